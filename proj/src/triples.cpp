#include "ddp/triples.hpp"

#include <algorithm>
#include <atomic>
#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/max_cardinality_matching.hpp>
#include <limits>
#include <sstream>
#include <thread>

#include "ddp/errors.hpp"
#include "ddp/rng.hpp"

namespace ddp {

int KTriple::mat(int u) const {
  for (std::size_t i = 0; i < C.size(); ++i)
    if (C[i] == u) return A[i];
  throw Error(Errc::InvalidArgument, "vertex " + std::to_string(u) + " is not in C");
}

int KTriple::mat_inverse(int a) const {
  for (std::size_t i = 0; i < A.size(); ++i)
    if (A[i] == a) return C[i];
  throw Error(Errc::InvalidArgument, "vertex " + std::to_string(a) + " is not in A");
}

TripleVerdict validate_triple(const Digraph& d, const KTriple& t) {
  TripleVerdict v;
  auto fail = [&v](std::string cond, std::string msg) {
    v.ok = false;
    v.condition = std::move(cond);
    v.message = std::move(msg);
    return v;
  };
  const std::size_t k = t.B.size();
  if (k == 0 || t.A.size() != k || t.C.size() != k)
    return fail("size", "A, B and C must be non-empty and of equal size");
  std::vector<int> seen(d.n(), 0);
  for (const auto* part : {&t.A, &t.B, &t.C})
    for (int x : *part) {
      if (x < 0 || x >= d.n()) {
        v.vertex = x;
        return fail("range", "vertex " + std::to_string(x) + " out of range");
      }
      if (seen[x]++) {
        v.vertex = x;
        return fail("disjoint", "vertex " + std::to_string(x) + " appears twice");
      }
    }
  auto missing = [&](int a, int b) {
    v.arc_tail = a;
    v.arc_head = b;
    return fail("arc", "missing arc " + std::to_string(a) + " -> " + std::to_string(b));
  };
  for (int a : t.A)
    for (int b : t.B)
      if (!d.has_arc(a, b)) return missing(a, b);
  for (int b : t.B)
    for (int c : t.C)
      if (!d.has_arc(b, c)) return missing(b, c);
  for (std::size_t i = 0; i < k; ++i)
    if (!d.has_arc(t.C[i], t.A[i])) return missing(t.C[i], t.A[i]);
  return v;
}

namespace {

/// Completes a fixed B into a triple: A from the common in-neighbours of B,
/// C from the common out-neighbours, joined by k disjoint arcs C -> A. A
/// vertex in both pools may serve on either side, so this is a matching in a
/// general graph.
std::optional<KTriple> complete_from_b(const Digraph& d, const std::vector<int>& B) {
  const int n = d.n(), k = static_cast<int>(B.size());
  Bits in_all = d.full_set(), out_all = d.full_set();
  for (int b : B) {
    in_all &= d.in(b);
    out_all &= d.out(b);
  }
  for (int b : B) {
    in_all.reset(b);
    out_all.reset(b);
  }
  if (static_cast<int>(in_all.count()) < k || static_cast<int>(out_all.count()) < k) return std::nullopt;
  const Bits pool = in_all | out_all;
  if (static_cast<int>(pool.count()) < 2 * k) return std::nullopt;

  std::vector<int> local(n, -1), global;
  for_each_bit(pool, [&](int v) {
    local[v] = static_cast<int>(global.size());
    global.push_back(v);
  });
  using G = boost::adjacency_list<boost::vecS, boost::vecS, boost::undirectedS>;
  G g(global.size());
  for (int c : global) {
    if (!out_all.test(c)) continue;
    for_each_bit(d.out(c) & in_all, [&](int a) {
      if (a == c) return;
      if (out_all.test(a) && in_all.test(c) && d.has_arc(a, c) && a < c) return;  // added from a's side
      boost::add_edge(local[c], local[a], g);
    });
  }
  std::vector<boost::graph_traits<G>::vertex_descriptor> mate(global.size());
  boost::edmonds_maximum_cardinality_matching(g, &mate[0]);
  std::vector<std::pair<int, int>> pairs;  // (c, a)
  for (std::size_t x = 0; x < global.size(); ++x) {
    const auto y = mate[x];
    if (y == boost::graph_traits<G>::null_vertex() || y < x) continue;
    const int p = global[x], q = global[y];
    // Prefer the lower-index vertex on the C side when both orientations fit.
    if (out_all.test(p) && in_all.test(q) && d.has_arc(p, q)) pairs.emplace_back(p, q);
    else pairs.emplace_back(q, p);
  }
  if (static_cast<int>(pairs.size()) < k) return std::nullopt;
  std::sort(pairs.begin(), pairs.end());
  KTriple t;
  t.B = B;
  for (int i = 0; i < k; ++i) {
    t.C.push_back(pairs[i].first);
    t.A.push_back(pairs[i].second);
  }
  return t;
}

std::vector<std::vector<int>> all_subsets(int n, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(k);
  for (int i = 0; i < k; ++i) cur[i] = i;
  if (k > n) return out;
  while (true) {
    out.push_back(cur);
    int i = k - 1;
    while (i >= 0 && cur[i] == n - k + i) --i;
    if (i < 0) break;
    ++cur[i];
    for (int j = i + 1; j < k; ++j) cur[j] = cur[j - 1] + 1;
  }
  return out;
}

/// Grows B from each seed vertex, always adding the candidate that keeps the
/// smaller of the two neighbour pools largest.
std::optional<KTriple> greedy_triple(const Digraph& d, int k, std::uint64_t* tried) {
  const int n = d.n();
  for (int seed = 0; seed < n; ++seed) {
    std::vector<int> B{seed};
    Bits in_all = d.in(seed), out_all = d.out(seed);
    Bits used = d.empty_set();
    used.set(seed);
    while (static_cast<int>(B.size()) < k) {
      int best = -1;
      long long best_score = -1;
      for (int v = 0; v < n; ++v) {
        if (used.test(v)) continue;
        Bits i2 = in_all & d.in(v), o2 = out_all & d.out(v);
        const long long score = std::min(i2.count(), o2.count());
        if (score > best_score) {
          best_score = score;
          best = v;
        }
      }
      if (best < 0 || best_score < k) break;
      B.push_back(best);
      used.set(best);
      in_all &= d.in(best);
      out_all &= d.out(best);
    }
    if (static_cast<int>(B.size()) < k) continue;
    ++*tried;
    std::sort(B.begin(), B.end());
    if (auto t = complete_from_b(d, B)) return t;
  }
  return std::nullopt;
}

}  // namespace

std::optional<KTriple> find_triple(const Digraph& d, int k, TripleSearch* search) {
  TripleSearch local;
  TripleSearch& s = search ? *search : local;
  s.b_sets = 0;
  if (k < 1 || 3 * k > d.n()) {
    s.exact = true;
    return std::nullopt;
  }
  if (d.n() > kTripleExactVertices || k > kTripleExactSize) {
    s.exact = false;
    return greedy_triple(d, k, &s.b_sets);
  }
  s.exact = true;
  const auto subsets = all_subsets(d.n(), k);
  const int jobs = std::max(1, s.jobs);
  std::atomic<std::size_t> next{0}, best{std::numeric_limits<std::size_t>::max()};
  std::atomic<std::uint64_t> examined{0};
  std::vector<std::optional<KTriple>> found(subsets.size() > 0 ? jobs : 0);
  auto worker = [&](int w) {
    std::optional<KTriple> mine;
    std::size_t mine_rank = std::numeric_limits<std::size_t>::max();
    while (true) {
      const std::size_t r = next.fetch_add(1);
      if (r >= subsets.size() || r > best.load()) break;
      examined.fetch_add(1);
      if (auto t = complete_from_b(d, subsets[r])) {
        if (r < mine_rank) {
          mine_rank = r;
          mine = std::move(t);
        }
        std::size_t cur = best.load();
        while (r < cur && !best.compare_exchange_weak(cur, r)) {
        }
        break;
      }
    }
    found[w] = std::move(mine);
  };
  if (jobs == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w) pool.emplace_back(worker, w);
    for (auto& th : pool) th.join();
  }
  s.b_sets = examined.load();
  // The winner is the lowest-rank B-set; every thread that found one stopped
  // at its own first hit, and the global minimum is among those hits.
  const std::size_t win = best.load();
  if (win == std::numeric_limits<std::size_t>::max()) return std::nullopt;
  for (auto& f : found)
    if (f && f->B == subsets[win]) return f;
  return complete_from_b(d, subsets[win]);
}

std::pair<Digraph, KTriple> plant_triple(int k, int padding, std::uint64_t seed) {
  if (k < 1 || padding < 0) throw Error(Errc::InvalidArgument, "plant_triple needs k >= 1 and padding >= 0");
  const int n = 3 * k + padding;
  SplitMix64 rng(seed);
  std::vector<int> label(n);
  for (int i = 0; i < n; ++i) label[i] = i;
  rng.shuffle(label);
  KTriple t;
  for (int i = 0; i < k; ++i) {
    t.A.push_back(label[i]);
    t.B.push_back(label[k + i]);
    t.C.push_back(label[2 * k + i]);
  }
  Digraph d(n);
  for (int a : t.A)
    for (int b : t.B) d.add_arc(a, b);
  for (int b : t.B)
    for (int c : t.C) d.add_arc(b, c);
  for (int i = 0; i < k; ++i) d.add_arc(t.C[i], t.A[i]);
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) {
      const bool forced = d.adjacent(u, v);
      if (!forced) {
        if (rng.next() >> 63) d.add_arc(u, v);
        else d.add_arc(v, u);
      }
      if (rng.chance(0.1)) {
        d.add_arc(u, v);
        d.add_arc(v, u);
      }
    }
  return {std::move(d), std::move(t)};
}

Instance planted_triple_instance(int k, int padding, int requests, int c, std::uint64_t seed, KTriple* triple) {
  if (padding < 2) throw Error(Errc::InvalidArgument, "planted instance needs padding >= 2 for terminals");
  if (requests < 1 || c < 1) throw Error(Errc::InvalidArgument, "planted instance needs requests >= 1 and c >= 1");
  SplitMix64 rng(seed);
  auto [d, t] = plant_triple(k, padding, rng.next());
  Bits inside(d.n());
  for (const auto* part : {&t.A, &t.B, &t.C})
    for (int x : *part) inside.set(x);
  std::vector<int> outside;
  for (int v = 0; v < d.n(); ++v)
    if (!inside.test(v)) outside.push_back(v);
  Instance inst;
  inst.graph = std::move(d);
  inst.congestion = c;
  const auto m = outside.size();
  for (int r = 0; r < requests; ++r) {
    const auto i = rng.below(m);
    auto j = rng.below(m - 1);
    if (j >= i) ++j;
    inst.requests.push_back({outside[i], outside[j], 1});
  }
  if (triple) *triple = t;
  return inst;
}

KTriple read_triple(const std::string& text, int n) {
  TextLines tl(text);
  auto fail = [](int line, const std::string& why) {
    throw Error(Errc::ParseError, "line " + std::to_string(line) + ": " + why);
  };
  if (tl.lines.empty() || tl.lines[0].second != "ktriple 1") fail(tl.lines.empty() ? 1 : tl.lines[0].first, "expected 'ktriple 1'");
  if (tl.lines.size() != 4) fail(tl.lines.back().first, "expected three index lines (A, B, C)");
  KTriple t;
  std::vector<int>* parts[3] = {&t.A, &t.B, &t.C};
  for (int p = 0; p < 3; ++p)
    for (auto x : parse_ints(tl.lines[p + 1].second, tl.lines[p + 1].first)) {
      if (x < 0 || x >= n) fail(tl.lines[p + 1].first, "vertex out of range");
      parts[p]->push_back(static_cast<int>(x));
    }
  if (t.A.size() != t.B.size() || t.B.size() != t.C.size()) fail(tl.lines[3].first, "A, B and C differ in size");
  return t;
}

std::string write_triple(const KTriple& t) {
  std::ostringstream os;
  os << "ktriple 1\n";
  for (const auto* part : {&t.A, &t.B, &t.C}) {
    for (std::size_t i = 0; i < part->size(); ++i) os << (i ? " " : "") << (*part)[i];
    os << "\n";
  }
  return os.str();
}

}  // namespace ddp

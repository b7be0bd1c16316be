#include "ddp/irrelevant.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "ddp/errors.hpp"
#include "ddp/pathwidth.hpp"

namespace ddp {

// ---------------------------------------------------------------------------
// Occupancy

bool Occupancy::i_free(int v, int i) const {
  const auto& L = lists.at(v);
  return static_cast<int>(L.size()) <= c - 1 || std::find(L.begin(), L.end(), i) != L.end();
}

std::vector<std::pair<std::vector<int>, std::vector<int>>> Occupancy::groups() const {
  std::map<std::vector<int>, std::vector<int>> g;
  for (std::size_t v = 0; v < lists.size(); ++v)
    if (!lists[v].empty()) g[lists[v]].push_back(static_cast<int>(v));
  return {g.begin(), g.end()};
}

Occupancy compute_occupancy(const Instance& inst, const RoutedSolution& sol, const KTriple* triple) {
  Occupancy occ;
  occ.c = inst.congestion;
  occ.lists.assign(inst.n(), {});
  Bits keep(inst.n());
  if (triple)
    for (const auto* part : {&triple->A, &triple->B, &triple->C})
      for (int x : *part) keep.set(x);
  for (int i = 0; i < static_cast<int>(sol.paths.size()); ++i)
    for (int v : sol.paths[i])
      if (!triple || keep.test(v)) occ.lists.at(v).push_back(i);
  return occ;
}

std::optional<std::pair<int, int>> find_free_pair(const KTriple& t, const Occupancy& occ, int i) {
  std::optional<std::pair<int, int>> best;
  for (std::size_t j = 0; j < t.C.size(); ++j)
    if (occ.i_free(t.C[j], i) && occ.i_free(t.A[j], i))
      if (!best || t.C[j] < best->first) best = std::make_pair(t.C[j], t.A[j]);
  return best;
}

int common_path(const Occupancy& occ, int u, int v, int k) {
  const auto &Lu = occ.lists.at(u), &Lv = occ.lists.at(v);
  if (static_cast<int>(Lu.size()) != occ.c || static_cast<int>(Lv.size()) != occ.c || 2 * occ.c <= k)
    throw Error(Errc::InvalidArgument, "common_path needs two full lists and 2c > k");
  for (int i : Lu)
    if (std::find(Lv.begin(), Lv.end(), i) != Lv.end()) return i;
  throw Error(Errc::InvalidArgument, "two full lists with 2c > k share no path index");
}

// ---------------------------------------------------------------------------
// Thresholds

namespace {

long long binomial(int n, int r) {
  if (r < 0 || r > n) return 0;
  long long b = 1;
  for (int i = 1; i <= r; ++i) b = b * (n - r + i) / i;
  return b;
}

}  // namespace

Thresholds Thresholds::defaults(int k, int c, int h) {
  Thresholds th;
  const long long K = k, Cc = c;
  th.h = h;
  th.d2 = 8 * K * (4 * K + 1) + 8 * K + Cc;
  th.m2 = 8 * K + Cc;
  th.x = 2 * th.d2 * th.m2;
  th.d1 = 7 * K * (4 * K + 1) + 8 * K + th.x;
  th.m1 = 8 * K + th.x;
  th.f = 3 * (4 * binomial(k, c) + 2 * K * (8 * Cc + 4) + th.x);
  return th;
}

Thresholds Thresholds::desk(long long f, long long x, long long m1, long long d1, long long m2, long long d2) {
  Thresholds th;
  th.f = f;
  th.x = x;
  th.m1 = m1;
  th.d1 = d1;
  th.m2 = m2;
  th.d2 = d2;
  return th;
}

// ---------------------------------------------------------------------------
// Shared helpers

namespace {

struct Sets {
  Bits A, B, C, K;
};

Sets triple_sets(int n, const KTriple& t) {
  Sets s{Bits(n), Bits(n), Bits(n), Bits(n)};
  for (int a : t.A) s.A.set(a);
  for (int b : t.B) s.B.set(b);
  for (int c : t.C) s.C.set(c);
  s.K = s.A | s.B | s.C;
  return s;
}

int position(const std::vector<int>& p, int v) {
  auto it = std::find(p.begin(), p.end(), v);
  return it == p.end() ? -1 : static_cast<int>(it - p.begin());
}

/// p[0..from] + middle + p[to..].
std::vector<int> splice(const std::vector<int>& p, int from, int to, const std::vector<int>& middle) {
  std::vector<int> out(p.begin(), p.begin() + from + 1);
  out.insert(out.end(), middle.begin(), middle.end());
  out.insert(out.end(), p.begin() + to, p.end());
  return out;
}

RoutedSolution replace_path(const RoutedSolution& sol, int i, std::vector<int> path, int n) {
  auto paths = sol.paths;
  paths[i] = std::move(path);
  return RoutedSolution::from_paths(n, std::move(paths));
}

std::string join(const std::vector<int>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? " " : "") << v[i];
  return os.str();
}

void check_common_preconditions(const Instance& inst, const KTriple& t) {
  if (inst.restricted) throw Error(Errc::RestrictedUnsupported, "the irrelevant-vertex pipeline needs an unrestricted instance");
  if (2 * inst.congestion <= inst.k())
    throw Error(Errc::PreconditionFailed, "needs 2c > k, got c = " + std::to_string(inst.congestion) +
                                              ", k = " + std::to_string(inst.k()));
  auto v = validate_triple(inst.graph, t);
  if (!v.ok) throw Error(Errc::InvalidArgument, "triple does not validate: " + v.message);
}

// ---------------------------------------------------------------------------
// Audit witnesses

AuditWitness make_witness(const Instance& inst, const RoutedSolution& sol, std::string bound,
                          const std::vector<std::pair<int, std::vector<int>>>& new_paths, std::string note) {
  AuditWitness w;
  w.bound = std::move(bound);
  w.path = new_paths.front().first;
  w.note = std::move(note);
  auto paths = sol.paths;
  for (const auto& [i, p] : new_paths) paths[i] = loop_erase(p);
  w.improved = RoutedSolution::from_paths(inst.n(), std::move(paths));
  bool ok = verify_solution(inst, w.improved).empty() && w.improved.total_length() < sol.total_length();
  if (ok && new_paths.size() == 1) ok = find_shortcut(inst, sol, w.path).has_value();
  w.confirmed = ok;
  return w;
}

/// b1 -> u -> Mat(u) -> b_last on path i, where b1 and b_last are B vertices
/// of the path in order.
AuditWitness pair_through_b(const Instance& inst, const RoutedSolution& sol, const std::string& bound, int i,
                            int b_first, int b_last, std::pair<int, int> pair) {
  const auto& P = sol.paths[i];
  auto walk = splice(P, position(P, b_first), position(P, b_last), {pair.first, pair.second});
  return make_witness(inst, sol, bound, {{i, walk}},
                      "shortcut " + std::to_string(b_first) + " -> " + std::to_string(pair.first) + " -> " +
                          std::to_string(pair.second) + " -> " + std::to_string(b_last));
}

std::vector<int> in_order(const std::vector<int>& path, const Bits& set) {
  std::vector<int> out;
  for (int v : path)
    if (set.test(v)) out.push_back(v);
  return out;
}

/// Two-path exchange for a list L holding five or more vertices of B and no
/// free pair for any index of L.
std::optional<AuditWitness> lemma5_exchange(const Instance& inst, const KTriple& t, const RoutedSolution& sol,
                                            const Occupancy& occ, const std::vector<int>& L, const Sets& S,
                                            const std::vector<int>& VLB) {
  const int c = inst.congestion, k = static_cast<int>(sol.paths.size());
  Bits vlb(inst.n());
  for (int b : VLB) vlb.set(b);
  for (int i : L) {
    const auto& Pi = sol.paths[i];
    const auto Ai = in_order(Pi, S.A);
    if (static_cast<int>(Ai.size()) < 4 * c + 1) continue;
    for (int l = 0; l < k; ++l) {
      if (std::find(L.begin(), L.end(), l) != L.end()) continue;
      std::vector<int> Cp;
      for (int a : Ai) {
        const int u = t.mat_inverse(a);
        const auto &Lu = occ.lists[u], &La = occ.lists[a];
        if (std::find(Lu.begin(), Lu.end(), l) != Lu.end() && std::find(La.begin(), La.end(), l) != La.end())
          Cp.push_back(u);
      }
      if (Cp.size() < 5) continue;
      Bits cset(inst.n()), aset(inst.n());
      for (int u : Cp) {
        cset.set(u);
        aset.set(t.mat(u));
      }
      const auto bs = in_order(Pi, vlb);
      const int b3 = bs[2];
      const auto& Pl = sol.paths[l];
      int first_a = -1, first_c = -1, last_c = -1;
      for (int p = 0; p < static_cast<int>(Pl.size()); ++p) {
        if (aset.test(Pl[p]) && first_a < 0) first_a = p;
        if (cset.test(Pl[p])) {
          if (first_c < 0) first_c = p;
          last_c = p;
        }
      }
      std::vector<int> new_l;
      int spent = -1;
      if (first_a >= 0 && (first_c < 0 || first_a < first_c) && last_c > first_a) {
        new_l = splice(Pl, first_a, last_c, {b3});
        spent = t.mat_inverse(Pl[first_a]);
      } else if (first_c >= 0 && last_c > first_c) {
        new_l = splice(Pl, first_c, last_c, {t.mat(Pl[first_c]), b3});
        spent = Pl[first_c];
      } else {
        continue;
      }
      new_l = loop_erase(new_l);
      for (int u : Cp) {
        if (u == spent || position(new_l, u) >= 0) continue;
        auto new_i = splice(Pi, position(Pi, bs.front()), position(Pi, bs.back()), {u, t.mat(u)});
        return make_witness(inst, sol, "lemma5", {{i, new_i}, {l, new_l}},
                            "paths " + std::to_string(l) + " and " + std::to_string(i) + " exchanged through " +
                                std::to_string(b3));
      }
    }
  }
  return std::nullopt;
}

}  // namespace

LemmaReport audit_lemma_bounds(const Instance& inst, const KTriple& t, const RoutedSolution& sol,
                               bool require_minimal) {
  if (2 * inst.congestion <= inst.k())
    throw Error(Errc::PreconditionFailed, "needs 2c > k, got c = " + std::to_string(inst.congestion) +
                                              ", k = " + std::to_string(inst.k()));
  if (auto v = verify_solution(inst, sol); !v.empty()) throw Error(Errc::InvalidSolution, describe(v));
  if (require_minimal && !is_minimal(inst, sol))
    throw Error(Errc::PreconditionFailed, "solution has a shortcut, so it is not of minimum total length");
  const int c = inst.congestion, k = static_cast<int>(sol.paths.size());
  const Sets S = triple_sets(inst.n(), t);
  const Occupancy occ = compute_occupancy(inst, sol, &t);
  LemmaReport rep;

  std::vector<std::vector<int>> PB(k), PA(k), PC(k);
  for (int i = 0; i < k; ++i) {
    PB[i] = in_order(sol.paths[i], S.B);
    PA[i] = in_order(sol.paths[i], S.A);
    PC[i] = in_order(sol.paths[i], S.C);
    rep.max_b_per_path = std::max<int>(rep.max_b_per_path, PB[i].size());
    rep.max_a_per_path = std::max<int>(rep.max_a_per_path, PA[i].size());
    rep.max_c_per_path = std::max<int>(rep.max_c_per_path, PC[i].size());
  }

  // Five-crossing bound: a path through five vertices of B leaves no free pair for it.
  for (int i = 0; i < k; ++i) {
    if (PB[i].size() < 5) continue;
    if (auto pair = find_free_pair(t, occ, i)) {
      rep.violations.push_back("lemma4: path " + std::to_string(i) + " has " + std::to_string(PB[i].size()) +
                               " vertices of B and the free pair (" + std::to_string(pair->first) + ", " +
                               std::to_string(pair->second) + ")");
      rep.witnesses.push_back(pair_through_b(inst, sol, "lemma4", i, PB[i][0], PB[i][4], *pair));
    }
  }

  // Full-list bound: a full list L holds at most four vertices of B.
  for (const auto& [L, verts] : occ.groups()) {
    if (static_cast<int>(L.size()) != c) continue;
    const auto vlb = in_order(verts, S.B);
    rep.max_b_per_full_list = std::max<int>(rep.max_b_per_full_list, vlb.size());
    if (vlb.size() < 5) continue;
    rep.violations.push_back("lemma5: list {" + join(L) + "} holds " + std::to_string(vlb.size()) + " vertices of B");
    std::optional<AuditWitness> w;
    for (int i : L)
      if (auto pair = find_free_pair(t, occ, i)) {
        const auto bs = in_order(sol.paths[i], S.B);
        w = pair_through_b(inst, sol, "lemma5", i, bs.front(), bs.back(), *pair);
        break;
      }
    if (!w) w = lemma5_exchange(inst, t, sol, occ, L, S, vlb);
    if (w) rep.witnesses.push_back(*w);
  }

  // A/C bound: with a non-full vertex b in B, paths meet A and C at most 8c+4 times.
  int free_b = -1;
  for (int b : t.B)
    if (static_cast<int>(occ.lists[b].size()) <= c - 1 && (free_b < 0 || b < free_b)) free_b = b;
  rep.lemma6_applies = free_b >= 0;
  if (rep.lemma6_applies) {
    const int bound = 8 * c + 4;
    for (int i = 0; i < k; ++i) {
      const auto& P = sol.paths[i];
      if (static_cast<int>(PA[i].size()) > bound) {
        rep.violations.push_back("lemma6a: path " + std::to_string(i) + " has " + std::to_string(PA[i].size()) +
                                 " vertices of A");
        const auto& v = PA[i];
        for (std::size_t j = 4; j < v.size(); ++j) {
          const int u = t.mat_inverse(v[j]);
          if (!occ.i_free(u, i)) continue;
          auto walk = splice(P, position(P, v[0]), position(P, v[j]), {free_b, u});
          rep.witnesses.push_back(make_witness(inst, sol, "lemma6a", {{i, walk}}, "shortcut through the free vertex of B"));
          break;
        }
      }
      if (static_cast<int>(PC[i].size()) > bound) {
        rep.violations.push_back("lemma6c: path " + std::to_string(i) + " has " + std::to_string(PC[i].size()) +
                                 " vertices of C");
        const auto& u = PC[i];
        for (std::size_t j = 0; j + 4 < u.size(); ++j) {
          const int a = t.mat(u[j]);
          if (!occ.i_free(a, i)) continue;
          auto walk = splice(P, position(P, u[j]), position(P, u.back()), {a, free_b});
          rep.witnesses.push_back(make_witness(inst, sol, "lemma6c", {{i, walk}}, "shortcut through the free vertex of B"));
          break;
        }
      }
    }
  }

  // Per-path bound: every path meets B at most four times.
  for (int i = 0; i < k; ++i) {
    if (PB[i].size() <= 4) continue;
    rep.violations.push_back("corollary1: path " + std::to_string(i) + " has " + std::to_string(PB[i].size()) +
                             " vertices of B");
    if (auto pair = find_free_pair(t, occ, i))
      rep.witnesses.push_back(pair_through_b(inst, sol, "corollary1", i, PB[i].front(), PB[i].back(), *pair));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Rerouting rounds

Instance masked_instance(const Instance& inst, const KTriple& t) {
  Instance m = inst;
  for (int c : t.C)
    for (int b : t.B) m.graph.remove_arc(c, b);
  for (int b : t.B)
    for (int a : t.A) m.graph.remove_arc(b, a);
  return m;
}

namespace {

/// S_b (entries, round one) or S'_b (exits, round two) for every b of B,
/// keyed by vertex. R-type vertices are the complement inside the same
/// neighbourhood.
std::map<int, Bits> small_sides(const Instance& masked, const KTriple& t, const Sets& S, bool entries,
                                long long threshold, int h) {
  const Digraph& g = masked.graph;
  std::map<int, Bits> out;
  for (int b : t.B) {
    Bits cand = entries ? (g.in(b) - S.A) : (g.out(b) - S.C);
    Bits small(g.n());
    for_each_bit(cand, [&](int v) {
      const long long deg = static_cast<long long>(((entries ? g.out(v) : g.in(v)) & S.B).count());
      if (deg < threshold + h) small.set(v);
    });
    out[b] = small;
  }
  return out;
}

void assert_semicomplete(const std::vector<int>& verts, const std::vector<std::pair<int, int>>& arcs, int h,
                         const char* what) {
  if (h != 0) return;
  std::map<int, int> local;
  for (std::size_t i = 0; i < verts.size(); ++i) local[verts[i]] = static_cast<int>(i);
  Digraph d(static_cast<int>(verts.size()));
  for (auto [u, v] : arcs) d.add_arc(local[u], local[v]);
  if (!is_semicomplete(d)) throw Error(Errc::InvalidArgument, std::string(what) + " is not semicomplete");
}

struct EditContext {
  const Instance& masked;
  const KTriple& t;
  Sets S;
  int n, c;
};

/// Lowest-index pair (u, Mat(u)) off path i with room on both ends.
std::optional<std::pair<int, int>> pair_off_path(const EditContext& ctx, const RoutedSolution& Q, int i,
                                                 const Bits& avoid) {
  const auto& P = Q.paths[i];
  std::optional<std::pair<int, int>> best;
  for (std::size_t j = 0; j < ctx.t.C.size(); ++j) {
    const int u = ctx.t.C[j], a = ctx.t.A[j];
    if (avoid.test(u) || avoid.test(a)) continue;
    if (position(P, u) >= 0 || position(P, a) >= 0) continue;
    if (Q.occupancy[u] > ctx.c - 1 || Q.occupancy[a] > ctx.c - 1) continue;
    if (!best || u < best->first) best = std::make_pair(u, a);
  }
  return best;
}

bool has_room(const RoutedSolution& Q, int i, int v, int c) {
  return position(Q.paths[i], v) < 0 && Q.occupancy[v] <= c - 1;
}

}  // namespace

void select_x(const Instance& masked, const KTriple& t, const Thresholds& th, ReroutePlan& plan) {
  const Sets S = triple_sets(masked.n(), t);
  const auto small = small_sides(masked, t, S, true, th.m1, th.h);
  std::vector<int> empty, busy;
  for (int b : t.B) (small.at(b).none() ? empty : busy).push_back(b);
  std::sort(empty.begin(), empty.end());
  std::sort(busy.begin(), busy.end());
  plan.gamma.clear();
  if (static_cast<long long>(empty.size()) >= th.x) {
    plan.round1_branch = "empty";
    plan.X = empty;
    return;
  }
  plan.round1_branch = "gamma";
  const Digraph& g = masked.graph;
  std::map<int, long long> outdeg;
  for (int b : busy)
    for (int b2 : busy) {
      if (b == b2) continue;
      bool arc = true;
      for_each_bit(small.at(b), [&](int v) {
        if (!arc || small.at(b2).test(v)) return;
        if ((small.at(b2) & g.out(v)).none()) arc = false;
      });
      if (arc) {
        plan.gamma.emplace_back(b, b2);
        ++outdeg[b];
      }
    }
  assert_semicomplete(busy, plan.gamma, th.h, "Gamma");
  plan.X.clear();
  for (int b : busy)
    if (outdeg[b] >= th.d1 * th.m1) plan.X.push_back(b);
  if (static_cast<long long>(plan.X.size()) < th.x)
    throw Error(Errc::TripleTooSmall, "round one: " + std::to_string(plan.X.size()) +
                                          " vertices reach out-degree d1*m1 in Gamma, x = " + std::to_string(th.x));
}

void select_special(const Instance& masked, const KTriple& t, const Thresholds& th, ReroutePlan& plan) {
  const Sets S = triple_sets(masked.n(), t);
  const auto small = small_sides(masked, t, S, false, th.m2, th.h);
  plan.gamma_prime.clear();
  for (int b : plan.X)
    if (small.at(b).none()) {
      plan.round2_branch = "empty";
      plan.special = b;
      return;
    }
  plan.round2_branch = "gamma";
  const Digraph& g = masked.graph;
  std::map<int, long long> indeg;
  for (int b2 : plan.X)
    for (int b : plan.X) {
      if (b == b2) continue;
      // Arc (b2, b): every small exit v of b is a small exit of b2 or is
      // entered from one.
      bool arc = true;
      for_each_bit(small.at(b), [&](int v) {
        if (!arc || small.at(b2).test(v)) return;
        if ((small.at(b2) & g.in(v)).none()) arc = false;
      });
      if (arc) {
        plan.gamma_prime.emplace_back(b2, b);
        ++indeg[b];
      }
    }
  assert_semicomplete(plan.X, plan.gamma_prime, th.h, "Gamma'");
  for (int b : plan.X)
    if (indeg[b] >= th.m2 * th.d2) {
      plan.special = b;
      return;
    }
  throw Error(Errc::TripleTooSmall, "round two: no vertex of X reaches in-degree m2*d2 in Gamma'");
}

ReroutePlan reroute_round1(const Instance& inst, const KTriple& t, const RoutedSolution& sol, const Thresholds& th) {
  check_common_preconditions(inst, t);
  const Instance masked = masked_instance(inst, t);
  if (auto v = verify_solution(masked, sol); !v.empty())
    throw Error(Errc::PreconditionFailed, "solution is not valid once arcs C->B and B->A are masked: " + describe(v));
  if (!is_minimal(masked, sol)) throw Error(Errc::PreconditionFailed, "solution has a shortcut");
  EditContext ctx{masked, t, triple_sets(inst.n(), t), inst.n(), inst.congestion};
  if ((inst.terminals() & ctx.S.K).any()) throw Error(Errc::PreconditionFailed, "a terminal lies in the triple");
  if (static_cast<long long>(t.B.size()) < th.x)
    throw Error(Errc::TripleTooSmall, "|B| = " + std::to_string(t.B.size()) + " is below x = " + std::to_string(th.x));

  ReroutePlan plan;
  select_x(masked, t, th, plan);
  const Digraph& g = masked.graph;
  const auto small = small_sides(masked, t, ctx.S, true, th.m1, th.h);
  Bits X(inst.n());
  for (int b : plan.X) X.set(b);
  std::map<int, std::vector<int>> gamma_out;
  for (auto [b, b2] : plan.gamma) gamma_out[b].push_back(b2);

  RoutedSolution Q = sol;
  std::vector<int> new_exterior(Q.paths.size(), 0);
  const int k = static_cast<int>(Q.paths.size());
  for (int i = 0; i < k; ++i) {
    for (int guard = 0;; ++guard) {
      if (guard > 8 * k + 8) throw Error(Errc::InvalidArgument, "round one does not terminate");
      const auto& P = Q.paths[i];
      int p = -1;
      for (int q = 1; q < static_cast<int>(P.size()); ++q)
        if (X.test(P[q]) && !ctx.S.A.test(P[q - 1])) {
          p = q;
          break;
        }
      if (p < 0) break;
      const int b = P[p], v = P[p - 1];
      RerouteEdit e;
      e.path = i;
      e.before = P;
      std::vector<int> middle;
      Bits avoid(inst.n());
      if (!small.at(b).test(v)) {
        e.rule = "R";
        int w = -1;
        for_each_bit(g.out(v) & ctx.S.B, [&](int x) {
          if (w < 0 && !X.test(x) && x != b && has_room(Q, i, x, ctx.c)) w = x;
        });
        if (w < 0)
          throw Error(Errc::TripleTooSmall, "round one: vertex " + std::to_string(v) +
                                                " has no out-neighbour in B outside X with room");
        avoid.set(w);
        middle = {w};
      } else {
        e.rule = "S";
        e.matching.emplace_back(v, b);
        Bits taken(inst.n());
        taken.set(v);
        for (int b2 : gamma_out[b]) {
          if (static_cast<long long>(e.matching.size()) - 1 >= th.d1) break;
          const Bits& s2 = small.at(b2);
          if ((s2 & taken).any()) continue;
          const Bits cand = s2 & g.out(v);
          if (cand.none()) continue;
          const int w = static_cast<int>(cand.find_first());
          e.matching.emplace_back(w, b2);
          taken.set(w);
        }
        int vj = -1, bj = -1;
        for (std::size_t j = 1; j < e.matching.size() && vj < 0; ++j) {
          auto [x, y] = e.matching[j];
          if (X.test(x) || X.test(y) || x == b || y == b) continue;
          if (has_room(Q, i, x, ctx.c) && has_room(Q, i, y, ctx.c)) {
            vj = x;
            bj = y;
          }
        }
        if (vj < 0)
          throw Error(Errc::TripleTooSmall, "round one: no arc of Y0 for path " + std::to_string(i) +
                                                " has both ends free");
        if (!ctx.S.K.test(vj) && ++new_exterior[i] > 1)
          throw Error(Errc::TripleTooSmall, "round one: path " + std::to_string(i) +
                                                " would take a second new vertex outside the triple");
        avoid.set(vj);
        avoid.set(bj);
        middle = {vj, bj};
      }
      auto pair = pair_off_path(ctx, Q, i, avoid);
      if (!pair) throw Error(Errc::NoFreePairAvailable, "round one: no free pair for path " + std::to_string(i));
      middle.push_back(pair->first);
      middle.push_back(pair->second);
      e.after = splice(P, p - 1, p, middle);
      Q = replace_path(Q, i, e.after, inst.n());
      plan.edits.push_back(std::move(e));
    }
  }
  if (auto v = verify_solution(masked, Q); !v.empty())
    throw Error(Errc::InvalidSolution, "round one produced an invalid solution: " + describe(v));
  // Property (ii): at most 4k new vertices of B and 4k new pairs.
  int new_b = 0, new_c = 0;
  for (int b : t.B) new_b += Q.occupancy[b] > 0 && sol.occupancy[b] == 0;
  for (int u : t.C) new_c += Q.occupancy[u] > 0 && sol.occupancy[u] == 0;
  if (new_b > 4 * k || new_c > 4 * k)
    throw Error(Errc::TripleTooSmall, "round one used more than 4k new vertices of B or new pairs");
  plan.Q = std::move(Q);
  return plan;
}

void reroute_round2(const Instance& inst, const KTriple& t, ReroutePlan& plan, const Thresholds& th) {
  check_common_preconditions(inst, t);
  const Instance masked = masked_instance(inst, t);
  EditContext ctx{masked, t, triple_sets(inst.n(), t), inst.n(), inst.congestion};
  if (static_cast<long long>(plan.X.size()) < th.x)
    throw Error(Errc::TripleTooSmall, "|X| = " + std::to_string(plan.X.size()) + " is below x");
  select_special(masked, t, th, plan);
  const int b = plan.special;
  const Digraph& g = masked.graph;
  const auto small = small_sides(masked, t, ctx.S, false, th.m2, th.h);
  Bits X(inst.n());
  for (int x : plan.X) X.set(x);
  std::vector<int> gamma_in;
  for (auto [b2, b1] : plan.gamma_prime)
    if (b1 == b) gamma_in.push_back(b2);
  std::sort(gamma_in.begin(), gamma_in.end());

  RoutedSolution Q = plan.Q;
  const int k = static_cast<int>(Q.paths.size());
  for (int i = 0; i < k; ++i) {
    const auto& P = Q.paths[i];
    const int p = position(P, b);
    if (p < 0 || p + 1 >= static_cast<int>(P.size()) || ctx.S.C.test(P[p + 1])) continue;
    const int v = P[p + 1];
    RerouteEdit e;
    e.path = i;
    e.before = P;
    std::vector<int> tail;
    Bits avoid(inst.n());
    if (!small.at(b).test(v)) {
      e.rule = "R'";
      int b1 = -1;
      for_each_bit(g.in(v) & ctx.S.B, [&](int x) {
        if (b1 < 0 && x != b && has_room(Q, i, x, ctx.c)) b1 = x;
      });
      if (b1 < 0)
        throw Error(Errc::TripleTooSmall, "round two: vertex " + std::to_string(v) +
                                              " has no in-neighbour in B with room");
      avoid.set(b1);
      tail = {b1};
    } else {
      e.rule = "S'";
      e.matching.emplace_back(b, v);
      Bits taken(inst.n());
      taken.set(v);
      for (int b2 : gamma_in) {
        if (static_cast<long long>(e.matching.size()) - 1 >= th.d2) break;
        const Bits& s2 = small.at(b2);
        if ((s2 & taken).any()) continue;
        const Bits cand = s2 & g.in(v);
        if (cand.none()) continue;
        const int w = static_cast<int>(cand.find_first());
        e.matching.emplace_back(b2, w);
        taken.set(w);
      }
      int bj = -1, vj = -1;
      for (std::size_t j = 1; j < e.matching.size() && bj < 0; ++j) {
        auto [x, y] = e.matching[j];
        if (x == b || y == b || X.test(y)) continue;
        if (has_room(Q, i, x, ctx.c) && has_room(Q, i, y, ctx.c)) {
          bj = x;
          vj = y;
        }
      }
      if (bj < 0)
        throw Error(Errc::TripleTooSmall, "round two: no arc of Y' for path " + std::to_string(i) +
                                              " has both ends free");
      avoid.set(bj);
      avoid.set(vj);
      tail = {bj, vj};
    }
    auto pair = pair_off_path(ctx, Q, i, avoid);
    if (!pair) throw Error(Errc::NoFreePairAvailable, "round two: no free pair for path " + std::to_string(i));
    std::vector<int> middle{pair->first, pair->second};
    middle.insert(middle.end(), tail.begin(), tail.end());
    e.after = splice(P, p, p + 1, middle);
    Q = replace_path(Q, i, e.after, inst.n());
    plan.edits.push_back(std::move(e));
  }
  if (auto v = verify_solution(masked, Q); !v.empty())
    throw Error(Errc::InvalidSolution, "round two produced an invalid solution: " + describe(v));
  int new_b = 0, new_c = 0;
  for (int x : t.B) new_b += Q.occupancy[x] > 0 && plan.Q.occupancy[x] == 0;
  for (int u : t.C) new_c += Q.occupancy[u] > 0 && plan.Q.occupancy[u] == 0;
  if (new_b > inst.congestion || new_c > inst.congestion)
    throw Error(Errc::TripleTooSmall, "round two used more than c new vertices of B or new pairs");
  plan.Q_prime = std::move(Q);
}

void reroute_final(const Instance& inst, const KTriple& t, ReroutePlan& plan) {
  const Sets S = triple_sets(inst.n(), t);
  const int b = plan.special;
  RoutedSolution Q = plan.Q_prime;
  for (int i = 0; i < static_cast<int>(Q.paths.size()); ++i) {
    const auto& P = Q.paths[i];
    const int p = position(P, b);
    if (p < 0) continue;
    if (p == 0 || p + 1 == static_cast<int>(P.size()) || !S.A.test(P[p - 1]) || !S.C.test(P[p + 1]))
      throw Error(Errc::InvalidArgument, "path " + std::to_string(i) + " does not pass the special vertex from A to C");
    int repl = -1;
    for (int x : t.B)
      if (x != b && has_room(Q, i, x, inst.congestion) && (repl < 0 || x < repl)) repl = x;
    if (repl < 0) throw Error(Errc::TripleTooSmall, "final step: no vertex of B has room");
    RerouteEdit e;
    e.path = i;
    e.rule = "final";
    e.before = P;
    e.after = P;
    e.after[p] = repl;
    Q = replace_path(Q, i, e.after, inst.n());
    plan.edits.push_back(std::move(e));
  }
  if (auto v = verify_solution(inst, Q); !v.empty())
    throw Error(Errc::InvalidSolution, "final step produced an invalid solution: " + describe(v));
  if (Q.occupancy[b] != 0) throw Error(Errc::InvalidSolution, "final solution still uses the special vertex");
  plan.final_solution = std::move(Q);
}

// ---------------------------------------------------------------------------
// Pipeline

namespace {

/// Drops matched pairs and B vertices that are terminals, then trims the
/// three lists to a common length.
KTriple drop_terminals(const KTriple& t, const Bits& term) {
  KTriple out;
  for (std::size_t i = 0; i < t.C.size(); ++i)
    if (!term.test(t.A[i]) && !term.test(t.C[i])) {
      out.A.push_back(t.A[i]);
      out.C.push_back(t.C[i]);
    }
  for (int b : t.B)
    if (!term.test(b)) out.B.push_back(b);
  const std::size_t m = std::min(out.A.size(), out.B.size());
  out.A.resize(m);
  out.C.resize(m);
  out.B.resize(m);
  return out;
}

std::string arcs_text(const std::vector<std::pair<int, int>>& arcs) {
  std::ostringstream os;
  for (std::size_t i = 0; i < arcs.size(); ++i) os << (i ? " " : "") << arcs[i].first << ">" << arcs[i].second;
  return os.str();
}

void trace_plan(const ReroutePlan& plan, std::vector<std::string>& tr) {
  for (const auto& e : plan.edits) {
    std::string line = "edit path " + std::to_string(e.path) + " rule " + e.rule + " before " + join(e.before) +
                       " after " + join(e.after);
    if (!e.matching.empty()) line += " matching " + arcs_text(e.matching);
    tr.push_back(line);
  }
}

}  // namespace

IrrelevantResult find_irrelevant_vertex(const Instance& inst, const KTriple& t, const Thresholds& th,
                                        const IrrelevantOptions& opt) {
  check_common_preconditions(inst, t);
  IrrelevantResult res;
  res.triple = drop_terminals(t, inst.terminals());
  const KTriple& T = res.triple;
  if (T.B.empty() || static_cast<long long>(T.B.size()) < th.x)
    throw Error(Errc::TripleTooSmall, "triple without terminals has size " + std::to_string(T.B.size()) +
                                          ", x = " + std::to_string(th.x));
  auto& tr = res.trace;
  tr.push_back("triple " + std::to_string(T.k()) + " A " + join(T.A) + " B " + join(T.B) + " C " + join(T.C));
  const Instance masked = masked_instance(inst, T);
  ReroutePlan plan;
  select_x(masked, T, th, plan);
  tr.push_back("round1 branch " + plan.round1_branch + " X " + join(plan.X));
  if (!plan.gamma.empty()) tr.push_back("gamma " + arcs_text(plan.gamma));
  select_special(masked, T, th, plan);
  tr.push_back("round2 branch " + plan.round2_branch + " special " + std::to_string(plan.special));
  if (!plan.gamma_prime.empty()) tr.push_back("gamma' " + arcs_text(plan.gamma_prime));
  res.vertex = plan.special;
  res.X = plan.X;
  res.round1_branch = plan.round1_branch;
  res.round2_branch = plan.round2_branch;

  if (inst.n() > opt.oracle_cap) {
    tr.push_back("oracle skipped: " + std::to_string(inst.n()) + " vertices above the cap");
    return res;
  }
  SolveMode mode;
  mode.time_limit_s = opt.oracle_time_limit_s;
  if (opt.oracle) {
    try {
      res.oracle_irrelevant = !is_relevant(inst, res.vertex, mode);
      res.oracle_checked = true;
      tr.push_back(std::string("oracle ") + (res.oracle_irrelevant ? "irrelevant" : "relevant"));
    } catch (const Error& e) {
      if (e.code() != Errc::BudgetExceeded) throw;
      tr.push_back("oracle budget exceeded");
    }
  }
  if (opt.certificate) {
    try {
      SolveMode mm = mode;
      mm.objective = Objective::MinTotalLength;
      auto sol = solve(masked, mm);
      if (!sol) {
        res.certificate_note = "masked instance infeasible";
      } else {
        ReroutePlan full = reroute_round1(inst, T, *sol, th);
        reroute_round2(inst, T, full, th);
        reroute_final(inst, T, full);
        trace_plan(full, tr);
        res.certified = full.special == res.vertex && full.final_solution.occupancy[res.vertex] == 0;
        res.certificate_note = res.certified ? "rerouted solution avoids the vertex" : "special vertex differs";
      }
    } catch (const Error& e) {
      res.certificate_note = e.what();
    }
    tr.push_back("certificate " + std::string(res.certified ? "yes" : "no") +
                 (res.certificate_note.empty() ? "" : ": " + res.certificate_note));
  }
  return res;
}

WinwinResult winwin_solve(const Instance& inst, const Thresholds& th, const WinwinOptions& opt) {
  if (inst.restricted) throw Error(Errc::RestrictedUnsupported, "winwin_solve needs an unrestricted instance");
  if (th.h == 0 && !is_semicomplete(inst.graph)) throw Error(Errc::InvalidArgument, "winwin_solve needs a semicomplete digraph");
  if (2 * inst.congestion <= inst.k())
    throw Error(Errc::PreconditionFailed, "needs 2c > k, got c = " + std::to_string(inst.congestion) +
                                              ", k = " + std::to_string(inst.k()));
  WinwinResult res;
  auto& tr = res.trace;
  Instance cur = inst;
  std::vector<int> idx(inst.n());
  for (int v = 0; v < inst.n(); ++v) idx[v] = v;
  for (int it = 0; it < opt.max_iterations && th.f >= 1; ++it) {
    const Bits term = cur.terminals();
    std::vector<int> keep;
    for (int v = 0; v < cur.n(); ++v)
      if (!term.test(v)) keep.push_back(v);
    TripleSearch search;
    search.jobs = opt.jobs;
    auto found = find_triple(cur.graph.induced(keep), static_cast<int>(th.f), &search);
    if (!found) {
      tr.push_back("iteration " + std::to_string(it) + " no " + std::to_string(th.f) + "-triple" +
                   (search.exact ? "" : " (heuristic search)"));
      break;
    }
    KTriple t;
    for (int a : found->A) t.A.push_back(keep[a]);
    for (int b : found->B) t.B.push_back(keep[b]);
    for (int c : found->C) t.C.push_back(keep[c]);
    IrrelevantResult r;
    try {
      r = find_irrelevant_vertex(cur, t, th, opt.irrelevant);
    } catch (const Error& e) {
      if (e.code() != Errc::TripleTooSmall && e.code() != Errc::NoFreePairAvailable) throw;
      tr.push_back("iteration " + std::to_string(it) + " stop: " + e.what());
      break;
    }
    for (const auto& line : r.trace) tr.push_back("  " + line);
    const bool verified = (r.oracle_checked && r.oracle_irrelevant) || r.certified;
    if ((r.oracle_checked && !r.oracle_irrelevant) || !verified) {
      res.rejected_candidate = r.oracle_checked && !r.oracle_irrelevant;
      tr.push_back("iteration " + std::to_string(it) + " keep vertex " + std::to_string(idx[r.vertex]) +
                   (res.rejected_candidate ? " (oracle: relevant)" : " (unverified)"));
      break;
    }
    tr.push_back("iteration " + std::to_string(it) + " delete vertex " + std::to_string(idx[r.vertex]));
    res.deleted.push_back(idx[r.vertex]);
    std::vector<int> old;
    cur = delete_vertex(cur, r.vertex, &old);
    std::vector<int> next(old.size());
    for (std::size_t j = 0; j < old.size(); ++j) next[j] = idx[old[j]];
    idx = std::move(next);
  }
  if (cur.n() > kDpwCap)
    throw Error(Errc::CapExceeded, std::to_string(cur.n()) + " vertices remain, above the decomposition cap " +
                                       std::to_string(kDpwCap));
  auto [w, dec] = exact_dpw(cur.graph);
  res.final_width = w;
  tr.push_back("decomposition width " + std::to_string(w) + " on " + std::to_string(cur.n()) + " vertices");
  auto sol = dp_solve(cur, dec);
  if (sol) {
    std::vector<std::vector<int>> paths;
    for (const auto& p : sol->paths) {
      std::vector<int> q;
      for (int v : p) q.push_back(idx[v]);
      paths.push_back(std::move(q));
    }
    res.solution = RoutedSolution::from_paths(inst.n(), std::move(paths));
    if (auto v = verify_solution(inst, *res.solution); !v.empty())
      throw Error(Errc::InvalidSolution, "lifted solution fails: " + describe(v));
  }
  tr.push_back(std::string("verdict ") + (sol ? "feasible" : "infeasible"));
  return res;
}

}  // namespace ddp

#include <algorithm>
#include <set>

#include "ddp/errors.hpp"
#include "ddp/reductions.hpp"
#include "ddp/rng.hpp"
#include "ddp/solver.hpp"

namespace ddp {

// ---------------------------------------------------------------------------
// Multicoloured clique sources

int MccInstance::vertex_count() const {
  int n = 0;
  for (const auto& c : classes) n += static_cast<int>(c.size());
  return n;
}

bool MccInstance::has_edge(int u, int v) const {
  for (auto [a, b] : edges)
    if ((a == u && b == v) || (a == v && b == u)) return true;
  return false;
}

std::string MccInstance::check() const {
  const int n = vertex_count();
  std::vector<int> cls(n, -1);
  for (std::size_t i = 0; i < classes.size(); ++i)
    for (int v : classes[i]) {
      if (v < 0 || v >= n) return "class vertex " + std::to_string(v) + " out of range";
      if (cls[v] >= 0) return "vertex " + std::to_string(v) + " is in two classes";
      cls[v] = static_cast<int>(i);
    }
  for (auto [a, b] : edges) {
    if (a < 0 || a >= n || b < 0 || b >= n) return "edge endpoint out of range";
    if (cls[a] == cls[b]) return "edge " + std::to_string(a) + "-" + std::to_string(b) + " inside one class";
  }
  return "";
}

MccInstance random_mcc(int q, int n, double p, std::uint64_t seed, bool plant, std::vector<int>* planted) {
  if (q < 1 || n < 1) throw Error(Errc::InvalidArgument, "random_mcc needs q >= 1 and n >= 1");
  SplitMix64 rng(seed);
  MccInstance m;
  for (int i = 0; i < q; ++i) {
    m.classes.emplace_back();
    for (int j = 0; j < n; ++j) m.classes.back().push_back(i * n + j);
  }
  std::vector<int> chosen;
  if (plant)
    for (int i = 0; i < q; ++i) chosen.push_back(i * n + static_cast<int>(rng.below(n)));
  std::set<std::pair<int, int>> e;
  for (std::size_t a = 0; a < chosen.size(); ++a)
    for (std::size_t b = a + 1; b < chosen.size(); ++b) e.insert({chosen[a], chosen[b]});
  for (int u = 0; u < q * n; ++u)
    for (int v = u + 1; v < q * n; ++v)
      if (u / n != v / n && rng.chance(p)) e.insert({u, v});
  m.edges.assign(e.begin(), e.end());
  if (planted) *planted = chosen;
  return m;
}

std::optional<std::vector<int>> mcc_brute_force(const MccInstance& mcc) {
  const int q = static_cast<int>(mcc.classes.size());
  const int N = mcc.vertex_count();
  std::vector<std::vector<char>> adj(N, std::vector<char>(N, 0));
  for (auto [a, b] : mcc.edges) adj[a][b] = adj[b][a] = 1;
  std::vector<int> pick;
  auto rec = [&](auto&& self, int i) -> bool {
    if (i == q) return true;
    for (int v : mcc.classes[i]) {
      bool ok = true;
      for (int u : pick) ok = ok && adj[u][v];
      if (!ok) continue;
      pick.push_back(v);
      if (self(self, i + 1)) return true;
      pick.pop_back();
    }
    return false;
  };
  if (rec(rec, 0)) return pick;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Construction

namespace {

/// Vertex numbering of the row gadgets. Gadget i (0-based) holds ten
/// terminals followed by columns j = 0..n+1 of 2q+5 vertices each:
/// alpha_j, beta1_j, beta2_j, a^0_j..a^q_j, b^0_j..b^q_j. The delta pairs
/// follow all gadgets, then z_s and z_t for the congested extension.
struct MccLayout {
  int q = 0, n = 0;
  enum Term { AlphaS = 0, AlphaT, AS, AT, BS, BT, G1S, G1T, G2S, G2T, kTerms };

  int column() const { return 2 * q + 5; }
  int gadget() const { return kTerms + (n + 2) * column(); }
  int term(int i, int t) const { return i * gadget() + t; }
  int col(int i, int j) const { return i * gadget() + kTerms + j * column(); }
  int alpha(int i, int j) const { return col(i, j); }
  int beta(int i, int j, int which) const { return col(i, j) + which; }  // which = 1 or 2
  int a(int i, int j, int l) const { return col(i, j) + 3 + l; }
  int b(int i, int j, int l) const { return col(i, j) + 3 + (q + 1) + l; }
  /// Index of the pair (i, l), i <= l, in row-major order.
  int pair_index(int i, int l) const { return i * q - i * (i - 1) / 2 + (l - i); }
  int pairs() const { return q * (q + 1) / 2; }
  int delta_s(int i, int l) const { return q * gadget() + 2 * pair_index(i, l); }
  int delta_t(int i, int l) const { return delta_s(i, l) + 1; }
  int base_size() const { return q * gadget() + 2 * pairs(); }
  int z_s() const { return base_size(); }
  int z_t() const { return base_size() + 1; }

  std::vector<int> alpha_row(int i) const {
    std::vector<int> r{term(i, AlphaS)};
    for (int j = 0; j <= n + 1; ++j) r.push_back(alpha(i, j));
    r.push_back(term(i, G2S));
    return r;
  }
  std::vector<int> a_row(int i) const {
    std::vector<int> r{term(i, AS)};
    for (int j = 0; j <= n + 1; ++j)
      for (int l = 0; l <= q; ++l) r.push_back(a(i, j, l));
    r.push_back(term(i, AlphaT));
    r.push_back(term(i, G1S));
    return r;
  }
  std::vector<int> b_row(int i) const {
    std::vector<int> r{term(i, BS)};
    for (int j = 0; j <= n + 1; ++j)
      for (int l = 0; l <= q; ++l) r.push_back(b(i, j, l));
    r.push_back(term(i, AT));
    return r;
  }
  std::vector<int> beta_row(int i) const {
    std::vector<int> r{term(i, G1T), term(i, G2T)};
    for (int j = 0; j <= n + 1; ++j) {
      r.push_back(beta(i, j, 1));
      r.push_back(beta(i, j, 2));
    }
    r.push_back(term(i, BT));
    return r;
  }
};

MccLayout layout_of(const ReductionArtifact& art) {
  if ((art.kind != SourceKind::Mcc && art.kind != SourceKind::MccCongested) || !art.mcc)
    throw Error(Errc::InvalidArgument, "artifact is not a clique reduction");
  return {static_cast<int>(art.mcc->classes.size()), art.mcc_n};
}

/// Unique Hamiltonian path along seq, every other pair oriented backwards.
void add_path_tournament(Digraph& g, const std::vector<int>& seq) {
  for (std::size_t k = 0; k + 1 < seq.size(); ++k) g.add_arc(seq[k], seq[k + 1]);
  for (std::size_t z = 2; z < seq.size(); ++z)
    for (std::size_t y = 0; y + 1 < z; ++y) g.add_arc(seq[z], seq[y]);
}

std::string sub(int i, int j) { return "[" + std::to_string(i + 1) + "," + std::to_string(j) + "]"; }

void name_vertices(std::vector<std::string>& names, const MccLayout& L) {
  static const char* const kTermName[] = {"alpha_s", "alpha_t", "a_s", "a_t", "b_s",
                                          "b_t",     "g1_s",    "g1_t", "g2_s", "g2_t"};
  for (int i = 0; i < L.q; ++i) {
    for (int t = 0; t < MccLayout::kTerms; ++t) names[L.term(i, t)] = std::string(kTermName[t]) + "[" + std::to_string(i + 1) + "]";
    for (int j = 0; j <= L.n + 1; ++j) {
      names[L.alpha(i, j)] = "alpha" + sub(i, j);
      names[L.beta(i, j, 1)] = "beta1" + sub(i, j);
      names[L.beta(i, j, 2)] = "beta2" + sub(i, j);
      for (int l = 0; l <= L.q; ++l) {
        names[L.a(i, j, l)] = "a" + std::to_string(l) + sub(i, j);
        names[L.b(i, j, l)] = "b" + std::to_string(l) + sub(i, j);
      }
    }
    for (int l = i; l < L.q; ++l) {
      const std::string pr = "[" + std::to_string(i + 1) + "," + std::to_string(l + 1) + "]";
      names[L.delta_s(i, l)] = "delta_s" + pr;
      names[L.delta_t(i, l)] = "delta_t" + pr;
    }
  }
}

/// Vertex order whose layout gives the width-2 decomposition: delta sinks,
/// gadgets from last to first, delta sources.
std::vector<int> decomposition_order(const MccLayout& L, bool congested) {
  std::vector<int> order;
  if (congested) order.push_back(L.z_t());
  for (int i = 0; i < L.q; ++i)
    for (int l = i; l < L.q; ++l) order.push_back(L.delta_t(i, l));
  if (congested) order.push_back(L.z_s());
  for (int i = L.q - 1; i >= 0; --i) {
    for (int v : L.beta_row(i)) order.push_back(v);
    for (int v : L.b_row(i)) order.push_back(v);
    auto ar = L.a_row(i);
    ar.pop_back();  // g1_s goes after the alpha row
    for (int v : ar) order.push_back(v);
    auto al = L.alpha_row(i);
    al.pop_back();
    for (int v : al) order.push_back(v);
    order.push_back(L.term(i, MccLayout::G1S));
    order.push_back(L.term(i, MccLayout::G2S));
  }
  for (int i = 0; i < L.q; ++i)
    for (int l = i; l < L.q; ++l) order.push_back(L.delta_s(i, l));
  return order;
}

CliquePartition row_partition(const MccLayout& L, bool congested) {
  CliquePartition cp;
  for (int i = 0; i < L.q; ++i)
    for (auto row : {L.alpha_row(i), L.a_row(i), L.b_row(i), L.beta_row(i)}) {
      std::sort(row.begin(), row.end());
      cp.parts.push_back(row);
    }
  for (int i = 0; i < L.q; ++i)
    for (int l = i; l < L.q; ++l) {
      cp.parts.push_back({L.delta_s(i, l)});
      cp.parts.push_back({L.delta_t(i, l)});
    }
  if (congested) {
    cp.parts.push_back({L.z_s()});
    cp.parts.push_back({L.z_t()});
  }
  return cp;
}

/// Position (1-based) of every clique vertex inside its class.
std::vector<int> clique_positions(const MccInstance& mcc, const std::vector<int>& clique) {
  const int q = static_cast<int>(mcc.classes.size());
  if (static_cast<int>(clique.size()) != q)
    throw Error(Errc::NotAClique, "expected one vertex per class (" + std::to_string(q) + ")");
  std::vector<int> pos(q);
  for (int i = 0; i < q; ++i) {
    auto it = std::find(mcc.classes[i].begin(), mcc.classes[i].end(), clique[i]);
    if (it == mcc.classes[i].end())
      throw Error(Errc::NotAClique, "vertex " + std::to_string(clique[i]) + " is not in class " + std::to_string(i + 1));
    pos[i] = static_cast<int>(it - mcc.classes[i].begin()) + 1;
  }
  for (int i = 0; i < q; ++i)
    for (int l = i + 1; l < q; ++l)
      if (!mcc.has_edge(clique[i], clique[l]))
        throw Error(Errc::NotAClique,
                    "vertices " + std::to_string(clique[i]) + " and " + std::to_string(clique[l]) + " are not adjacent");
  return pos;
}

}  // namespace

ReductionArtifact reduce_mcc(const MccInstance& mcc) {
  auto why = mcc.check();
  if (!why.empty()) throw Error(Errc::InvalidArgument, "not a multicoloured clique instance: " + why);
  if (mcc.classes.empty()) throw Error(Errc::InvalidArgument, "no colour classes");
  const int n = static_cast<int>(mcc.classes[0].size());
  for (const auto& c : mcc.classes)
    if (static_cast<int>(c.size()) != n) throw Error(Errc::UnequalClasses, "colour classes differ in size");
  if (n < 1) throw Error(Errc::InvalidArgument, "empty colour classes");
  MccLayout L{static_cast<int>(mcc.classes.size()), n};
  const int q = L.q;

  ReductionArtifact art;
  art.kind = SourceKind::Mcc;
  art.mcc = mcc;
  art.mcc_n = n;
  auto& inst = art.instance;
  inst.graph = Digraph(L.base_size());
  auto& g = inst.graph;
  inst.names.assign(L.base_size(), "");
  name_vertices(inst.names, L);

  for (int i = 0; i < q; ++i) {
    // Rows: each is a tournament with a unique Hamiltonian path.
    add_path_tournament(g, L.alpha_row(i));
    add_path_tournament(g, L.a_row(i));
    add_path_tournament(g, L.b_row(i));
    add_path_tournament(g, L.beta_row(i));
    // Matching between the a- and b-tournaments of every column.
    for (int j = 0; j <= n + 1; ++j)
      for (int l = 1; l <= q; ++l) g.add_arc(L.a(i, j, l), L.b(i, j, l));
    // Forward jumping arcs.
    for (int j = 0; j <= n - 1; ++j) {
      g.add_arc(L.alpha(i, j), L.a(i, j + 2, 0));
      g.add_arc(L.a(i, j, q), L.b(i, j + 2, 0));
      g.add_arc(L.b(i, j, q), L.beta(i, j + 1, 1));
    }
    // Backward jumping arcs.
    for (int j = 1; j <= n; ++j) {
      g.add_arc(L.alpha(i, j), L.beta(i, j - 1, 2));
      g.add_arc(L.a(i, j, 0), L.beta(i, j - 1, 1));
    }
  }
  // Delta requests and the edges of the source graph.
  for (int i = 0; i < q; ++i)
    for (int l = i; l < q; ++l)
      for (int j = 1; j <= n; ++j) {
        g.add_arc(L.delta_s(i, l), L.a(i, j, l + 1));
        g.add_arc(L.b(l, j, i + 1), L.delta_t(i, l));
      }
  for (auto [u, v] : mcc.edges) {
    int cu = -1, cv = -1, ju = 0, jv = 0;
    for (int i = 0; i < q; ++i) {
      auto iu = std::find(mcc.classes[i].begin(), mcc.classes[i].end(), u);
      if (iu != mcc.classes[i].end()) cu = i, ju = static_cast<int>(iu - mcc.classes[i].begin()) + 1;
      auto iv = std::find(mcc.classes[i].begin(), mcc.classes[i].end(), v);
      if (iv != mcc.classes[i].end()) cv = i, jv = static_cast<int>(iv - mcc.classes[i].begin()) + 1;
    }
    if (cu > cv) std::swap(cu, cv), std::swap(ju, jv);
    g.add_arc(L.b(cu, ju, cv + 1), L.a(cv, jv, cu + 1));
  }

  for (int i = 0; i < q; ++i) {
    inst.requests.push_back({L.term(i, MccLayout::AlphaS), L.term(i, MccLayout::AlphaT), 1});
    inst.requests.push_back({L.term(i, MccLayout::AS), L.term(i, MccLayout::AT), 1});
    inst.requests.push_back({L.term(i, MccLayout::BS), L.term(i, MccLayout::BT), 1});
    inst.requests.push_back({L.term(i, MccLayout::G1S), L.term(i, MccLayout::G1T), 1});
    inst.requests.push_back({L.term(i, MccLayout::G2S), L.term(i, MccLayout::G2T), 1});
  }
  for (int i = 0; i < q; ++i)
    for (int l = i; l < q; ++l) inst.requests.push_back({L.delta_s(i, l), L.delta_t(i, l), 1});
  inst.congestion = 1;

  art.decomposition = layout_to_decomposition(g, decomposition_order(L, false));
  art.cliques = row_partition(L, false);
  for (int v = 0; v < g.n(); ++v) art.index[inst.names[v]] = v;
  return art;
}

ReductionArtifact mcc_congested_extension(const ReductionArtifact& base, int c) {
  if (base.kind != SourceKind::Mcc) throw Error(Errc::InvalidArgument, "extension needs a plain clique reduction");
  if (c < 2) throw Error(Errc::InvalidArgument, "congested extension needs c >= 2");
  const auto L = layout_of(base);
  ReductionArtifact art = base;
  art.kind = SourceKind::MccCongested;
  auto& inst = art.instance;
  const int N = L.base_size() + 2;
  Digraph g(N);
  for (auto [u, v] : base.instance.graph.arcs()) g.add_arc(u, v);
  inst.names.push_back("z_s");
  inst.names.push_back("z_t");
  g.add_arc(L.z_s(), L.term(L.q - 1, MccLayout::G1T));
  g.add_arc(L.term(0, MccLayout::G2S), L.z_t());
  for (int i = 0; i < L.q; ++i) {
    g.add_arc(L.term(i, MccLayout::BT), L.term(i, MccLayout::BS));
    g.add_arc(L.term(i, MccLayout::AT), L.term(i, MccLayout::AS));
    g.add_arc(L.term(i, MccLayout::G1S), L.term(i, MccLayout::AlphaS));
    if (i > 0) g.add_arc(L.term(i, MccLayout::G2S), L.term(i - 1, MccLayout::G1T));
  }
  inst.graph = std::move(g);
  inst.requests.push_back({L.z_s(), L.z_t(), c - 1});
  inst.congestion = c;
  art.decomposition = layout_to_decomposition(inst.graph, decomposition_order(L, true));
  art.cliques = row_partition(L, true);
  art.index["z_s"] = L.z_s();
  art.index["z_t"] = L.z_t();
  art.critical_path = mcc_near_hamiltonian_path(art);
  return art;
}

std::vector<int> mcc_near_hamiltonian_path(const ReductionArtifact& art) {
  if (art.kind != SourceKind::MccCongested) throw Error(Errc::InvalidArgument, "artifact has no z_s/z_t pair");
  const auto L = layout_of(art);
  std::vector<int> p{L.z_s()};
  for (int i = L.q - 1; i >= 0; --i) {
    for (int v : L.beta_row(i)) p.push_back(v);  // ends at b_t
    for (int v : L.b_row(i)) p.push_back(v);     // b_s .. a_t
    for (int v : L.a_row(i)) p.push_back(v);     // a_s .. alpha_t, g1_s
    for (int v : L.alpha_row(i)) p.push_back(v); // alpha_s .. g2_s
  }
  p.push_back(L.z_t());
  return p;
}

RoutedSolution mcc_solution_from_clique(const ReductionArtifact& art, const std::vector<int>& clique) {
  const auto L = layout_of(art);
  const auto u = clique_positions(*art.mcc, clique);
  const int q = L.q, n = L.n;
  std::vector<std::vector<int>> paths;
  for (int i = 0; i < q; ++i) {
    const int ui = u[i];
    std::vector<int> alpha{L.term(i, MccLayout::AlphaS)};
    for (int j = 0; j < ui; ++j) alpha.push_back(L.alpha(i, j));
    for (int j = ui + 1; j <= n + 1; ++j)
      for (int l = 0; l <= q; ++l) alpha.push_back(L.a(i, j, l));
    alpha.push_back(L.term(i, MccLayout::AlphaT));

    std::vector<int> a{L.term(i, MccLayout::AS)};
    for (int j = 0; j < ui; ++j)
      for (int l = 0; l <= q; ++l) a.push_back(L.a(i, j, l));
    for (int j = ui + 1; j <= n + 1; ++j)
      for (int l = 0; l <= q; ++l) a.push_back(L.b(i, j, l));
    a.push_back(L.term(i, MccLayout::AT));

    std::vector<int> b{L.term(i, MccLayout::BS)};
    for (int j = 0; j < ui; ++j)
      for (int l = 0; l <= q; ++l) b.push_back(L.b(i, j, l));
    for (int j = ui; j <= n + 1; ++j) {
      b.push_back(L.beta(i, j, 1));
      b.push_back(L.beta(i, j, 2));
    }
    b.push_back(L.term(i, MccLayout::BT));

    std::vector<int> g1{L.term(i, MccLayout::G1S), L.a(i, ui, 0), L.beta(i, ui - 1, 1), L.term(i, MccLayout::G1T)};
    std::vector<int> g2{L.term(i, MccLayout::G2S), L.alpha(i, ui), L.beta(i, ui - 1, 2), L.term(i, MccLayout::G2T)};
    for (auto* p : {&alpha, &a, &b, &g1, &g2}) paths.push_back(*p);
  }
  for (int i = 0; i < q; ++i)
    for (int l = i; l < q; ++l) {
      if (i == l)
        paths.push_back({L.delta_s(i, i), L.a(i, u[i], i + 1), L.b(i, u[i], i + 1), L.delta_t(i, i)});
      else
        paths.push_back({L.delta_s(i, l), L.a(i, u[i], l + 1), L.b(i, u[i], l + 1), L.a(l, u[l], i + 1),
                         L.b(l, u[l], i + 1), L.delta_t(i, l)});
    }
  if (art.kind == SourceKind::MccCongested) {
    const auto z = mcc_near_hamiltonian_path(art);
    for (int r = 1; r < art.instance.congestion; ++r) paths.push_back(z);
  }
  return RoutedSolution::from_paths(art.instance.n(), std::move(paths));
}

std::vector<int> mcc_clique_from_solution(const ReductionArtifact& art, const RoutedSolution& sol) {
  const auto L = layout_of(art);
  std::vector<Violation> bad;
  try {
    bad = verify_solution(art.instance, sol);
  } catch (const Error& e) {
    throw Error(Errc::InvalidSolution, e.reason());
  }
  if (!bad.empty()) throw Error(Errc::InvalidSolution, describe(bad));
  for (int i = 0; i < static_cast<int>(sol.paths.size()); ++i)
    if (find_shortcut(art.instance, sol, i))
      throw Error(Errc::NotMinimal, "path " + std::to_string(i) + " admits a shortcut");
  std::vector<int> clique;
  for (int i = 0; i < L.q; ++i) {
    // The internal requests of gadget i are the five requests 5i..5i+4.
    std::vector<char> used(art.instance.n(), 0);
    for (int r = 5 * i; r < 5 * i + 5; ++r)
      for (int v : sol.paths[r]) used[v] = 1;
    int gap = -1, gaps = 0;
    for (int j = 1; j <= L.n; ++j) {
      bool free = true;
      for (int l = 1; l <= L.q; ++l) free = free && !used[L.a(i, j, l)] && !used[L.b(i, j, l)];
      if (free) gap = j, ++gaps;
    }
    if (gaps != 1)
      throw Error(Errc::NoGapFound, "gadget " + std::to_string(i + 1) + " has " + std::to_string(gaps) + " gaps");
    clique.push_back(art.mcc->classes[i][gap - 1]);
  }
  clique_positions(*art.mcc, clique);  // NotAClique if the read-off fails
  return clique;
}

}  // namespace ddp

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ddp/errors.hpp"
#include "ddp/reductions.hpp"
#include "ddp/rng.hpp"

namespace ddp {

// ---------------------------------------------------------------------------
// (3,1)-3-SAT

bool Sat31Instance::satisfied_by(const std::vector<bool>& assignment) const {
  if (static_cast<int>(assignment.size()) != n_vars) return false;
  for (const auto& cl : clauses) {
    bool ok = false;
    for (const auto& l : cl) ok = ok || (assignment[l.var] == l.positive);
    if (!ok) return false;
  }
  return true;
}

std::string Sat31Instance::check() const {
  if (n_vars <= 0) return "no variables";
  if (3 * static_cast<int>(clauses.size()) != 4 * n_vars) return "clause count must be 4n/3";
  std::vector<int> pos(n_vars, 0), neg(n_vars, 0);
  for (std::size_t a = 0; a < clauses.size(); ++a) {
    const auto& cl = clauses[a];
    if (cl.size() != 3) return "clause " + std::to_string(a) + " does not have 3 literals";
    for (std::size_t j = 0; j < 3; ++j) {
      if (cl[j].var < 0 || cl[j].var >= n_vars) return "clause " + std::to_string(a) + " names an unknown variable";
      for (std::size_t k = 0; k < j; ++k)
        if (cl[k].var == cl[j].var) return "clause " + std::to_string(a) + " repeats a variable";
      ++(cl[j].positive ? pos : neg)[cl[j].var];
    }
  }
  for (int v = 0; v < n_vars; ++v)
    if (pos[v] != 3 || neg[v] != 1) return "variable " + std::to_string(v) + " does not occur 3+/1- times";
  return "";
}

Sat31Instance random_sat31(int n_vars, std::uint64_t seed) {
  if (n_vars <= 0 || n_vars % 3 != 0)
    throw Error(Errc::BadArity, "n_vars=" + std::to_string(n_vars) + " is not a positive multiple of 3");
  std::vector<Literal> occ;
  for (int v = 0; v < n_vars; ++v) {
    for (int r = 0; r < 3; ++r) occ.push_back({v, true});
    occ.push_back({v, false});
  }
  SplitMix64 rng(seed);
  const int m = 4 * n_vars / 3;
  // Reshuffle the whole occurrence multiset until no clause repeats a variable.
  for (int attempt = 0; attempt < 1000000; ++attempt) {
    rng.shuffle(occ);
    bool ok = true;
    for (int a = 0; a < m && ok; ++a) {
      const Literal* c = &occ[3 * a];
      ok = c[0].var != c[1].var && c[0].var != c[2].var && c[1].var != c[2].var;
    }
    if (!ok) continue;
    Sat31Instance s;
    s.n_vars = n_vars;
    for (int a = 0; a < m; ++a) s.clauses.push_back({occ[3 * a], occ[3 * a + 1], occ[3 * a + 2]});
    return s;
  }
  throw Error(Errc::CapExceeded, "random_sat31 retry limit reached");
}

namespace {

void require_small_sat(const Sat31Instance& sat) {
  if (sat.n_vars > 20) throw Error(Errc::CapExceeded, "brute force over more than 2^20 assignments");
}

std::vector<bool> assignment_of(int n, std::uint32_t mask) {
  std::vector<bool> a(n);
  for (int v = 0; v < n; ++v) a[v] = (mask >> (n - 1 - v)) & 1u;
  return a;
}

}  // namespace

std::optional<std::vector<bool>> sat_brute_force(const Sat31Instance& sat) {
  require_small_sat(sat);
  for (std::uint32_t mask = 0; mask < (1u << sat.n_vars); ++mask) {
    auto a = assignment_of(sat.n_vars, mask);
    if (sat.satisfied_by(a)) return a;
  }
  return std::nullopt;
}

std::uint64_t sat_count(const Sat31Instance& sat) {
  require_small_sat(sat);
  std::uint64_t count = 0;
  for (std::uint32_t mask = 0; mask < (1u << sat.n_vars); ++mask)
    if (sat.satisfied_by(assignment_of(sat.n_vars, mask))) ++count;
  return count;
}

// ---------------------------------------------------------------------------
// Artifacts

const char* source_name(SourceKind k) {
  switch (k) {
    case SourceKind::SatTournament: return "sat-tournament";
    case SourceKind::Restricted: return "restricted";
    case SourceKind::Epsilon: return "epsilon";
    case SourceKind::C2: return "c2";
    case SourceKind::Mcc: return "mcc";
    case SourceKind::MccCongested: return "mcc-congested";
  }
  return "?";
}

int ReductionArtifact::vertex(const std::string& label) const {
  auto it = index.find(label);
  if (it == index.end()) throw Error(Errc::InvalidArgument, "no vertex labelled '" + label + "'");
  return it->second;
}

namespace {

// Butterfly slots, in vertex order within a gadget.
enum Part { S = 0, T, SB, TB, AL, XA, XB, XC, XD, kParts };
const char* const kPartName[kParts] = {"s", "t", "sb", "tb", "alpha", "xa", "xb", "xc", "xd"};

// The 36 arcs of the butterfly tournament: the drawn arcs first, then the
// completion running right-to-left and top-to-bottom.
constexpr std::pair<int, int> kButterfly[] = {
    {SB, AL}, {AL, TB}, {SB, XD}, {XD, TB}, {S, AL},  {AL, T},  {S, XA},  {XA, XB}, {XB, XC},
    {XC, T},  {AL, XD}, {AL, XA}, {AL, XB}, {XC, AL}, {TB, XA}, {TB, XB}, {TB, XC}, {SB, XA},
    {SB, XB}, {SB, XC}, {TB, S},  {SB, T},  {SB, S},  {TB, T},  {XD, XC}, {XD, T},  {XD, XB},
    {XD, XA}, {XD, S},  {T, XB},  {T, XA},  {T, S},   {XC, XA}, {XC, S},  {XB, S},  {TB, SB},
};
static_assert(std::size(kButterfly) == 36);

int bv(int var, int part) { return kParts * var + part; }

std::string label(const char* base, int one_based) { return std::string(base) + "_" + std::to_string(one_based); }

void name_butterflies(std::vector<std::string>& names, int n_vars) {
  for (int i = 0; i < n_vars; ++i)
    for (int p = 0; p < kParts; ++p) names[bv(i, p)] = label(kPartName[p], i + 1);
}

/// Literal vertex of every clause position: positive occurrences take xa, xb,
/// xc in clause order; the negative occurrence takes xd.
std::vector<std::vector<int>> literal_vertices(const Sat31Instance& sat) {
  std::vector<int> seen(sat.n_vars, 0);
  std::vector<std::vector<int>> out;
  for (const auto& cl : sat.clauses) {
    std::vector<int> row;
    for (const auto& l : cl) row.push_back(l.positive ? bv(l.var, XA + seen[l.var]++) : bv(l.var, XD));
    out.push_back(row);
  }
  return out;
}

/// Butterflies with their internal arcs and all arcs from B_j to B_i, j > i.
void add_butterflies(Digraph& g, int n_vars) {
  for (int i = 0; i < n_vars; ++i) {
    for (auto [a, b] : kButterfly) g.add_arc(bv(i, a), bv(i, b));
    for (int j = i + 1; j < n_vars; ++j)
      for (int a = 0; a < kParts; ++a)
        for (int b = 0; b < kParts; ++b) g.add_arc(bv(j, a), bv(i, b));
  }
}

/// Reverses (xa_{i+1}, xd_i) so the wing interiors chain into one path.
void chain_butterflies(Digraph& g, int n_vars) {
  for (int i = 0; i + 1 < n_vars; ++i) {
    g.remove_arc(bv(i + 1, XA), bv(i, XD));
    g.add_arc(bv(i, XD), bv(i + 1, XA));
  }
}

std::vector<int> wing_chain(int n_vars) {
  std::vector<int> p;
  for (int i = 0; i < n_vars; ++i)
    for (int part : {XA, XB, XC, AL, XD}) p.push_back(bv(i, part));
  return p;
}

void finish(ReductionArtifact& art) {
  for (int v = 0; v < art.instance.n(); ++v) art.index[art.instance.names[v]] = v;
}

void require_valid(const Sat31Instance& sat) {
  auto why = sat.check();
  if (!why.empty()) throw Error(Errc::InvalidArgument, "not a (3,1)-3-SAT instance: " + why);
}

/// Base tournament; clause a owns vertices 9n + 2a (p_a) and 9n + 2a + 1 (q_a).
ReductionArtifact build_tournament(const Sat31Instance& sat, int extra_vertices) {
  require_valid(sat);
  const int nv = sat.n_vars, m = static_cast<int>(sat.clauses.size());
  const int base = kParts * nv;
  const int N = base + 2 * m + extra_vertices;
  ReductionArtifact art;
  art.sat = sat;
  auto& inst = art.instance;
  inst.graph = Digraph(N);
  inst.names.assign(N, "");
  name_butterflies(inst.names, nv);
  add_butterflies(inst.graph, nv);
  auto lits = literal_vertices(sat);
  for (int a = 0; a < m; ++a) {
    const int p = base + 2 * a, q = p + 1;
    inst.names[p] = label("p", a + 1);
    inst.names[q] = label("q", a + 1);
    inst.graph.add_arc(q, p);
    for (int v = 0; v < base; ++v) {
      bool lit = std::find(lits[a].begin(), lits[a].end(), v) != lits[a].end();
      if (lit) {
        inst.graph.add_arc(p, v);
        inst.graph.add_arc(v, q);
      } else {
        inst.graph.add_arc(v, p);
        inst.graph.add_arc(q, v);
      }
    }
    // Free arcs between clause gadgets run from the higher index to the lower.
    for (int x = base; x < base + 2 * a; ++x) {
      inst.graph.add_arc(p, x);
      inst.graph.add_arc(q, x);
    }
  }
  for (int i = 0; i < nv; ++i) {
    inst.requests.push_back({bv(i, S), bv(i, T), 1});
    inst.requests.push_back({bv(i, SB), bv(i, TB), 1});
  }
  for (int a = 0; a < m; ++a) inst.requests.push_back({base + 2 * a, base + 2 * a + 1, 1});
  art.sat_requests = 2 * nv + m;
  return art;
}

/// Restricted construction with a given congestion.
ReductionArtifact build_restricted(const Sat31Instance& sat, int c) {
  auto art = build_tournament(sat, 2);
  auto& inst = art.instance;
  auto& g = inst.graph;
  const int nv = sat.n_vars;
  const int s_star = g.n() - 2, t_star = g.n() - 1;
  inst.names[s_star] = "s*";
  inst.names[t_star] = "t*";
  chain_butterflies(g, nv);
  const int first = bv(0, XA), last = bv(nv - 1, XD);
  for (int v = 0; v < s_star; ++v) {
    if (v == first)
      g.add_arc(s_star, v);
    else
      g.add_arc(v, s_star);
    if (v == last)
      g.add_arc(v, t_star);
    else
      g.add_arc(t_star, v);
  }
  g.add_arc(t_star, s_star);
  if (c > 1) inst.requests.push_back({s_star, t_star, c - 1});
  inst.requests.push_back({t_star, s_star, 1});
  inst.congestion = c;
  inst.restricted = true;
  art.kind = SourceKind::Restricted;
  art.critical_path.push_back(s_star);
  for (int v : wing_chain(nv)) art.critical_path.push_back(v);
  art.critical_path.push_back(t_star);
  finish(art);
  return art;
}

}  // namespace

ReductionArtifact reduce_sat_to_tournament(const Sat31Instance& sat) {
  auto art = build_tournament(sat, 0);
  art.kind = SourceKind::SatTournament;
  finish(art);
  return art;
}

ReductionArtifact reduce_restricted(const Sat31Instance& sat, int d) {
  require_valid(sat);
  const int k = 2 * sat.n_vars + static_cast<int>(sat.clauses.size());
  if (d < 2) throw Error(Errc::BadRatio, "ratio d=" + std::to_string(d) + " must be at least 2");
  if (k % (d - 1) != 0)
    throw Error(Errc::BadRatio, "|K|=" + std::to_string(k) + " is not divisible by d-1=" + std::to_string(d - 1));
  return build_restricted(sat, k / (d - 1));
}

int epsilon_congestion(int one_shot_requests, double epsilon) {
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw Error(Errc::InvalidArgument, "epsilon must lie in [0, 1)");
  int c = 1;
  for (int it = 0; it < 10000; ++it) {
    const double k = static_cast<double>(one_shot_requests + 1) * c;
    const int next = std::max(1, static_cast<int>(std::ceil(std::pow(k, epsilon) - 1e-9)));
    if (next == c) return c;
    c = next;
  }
  throw Error(Errc::CapExceeded, "epsilon congestion did not reach a fixed point");
}

ReductionArtifact reduce_epsilon(const Sat31Instance& sat, double epsilon) {
  require_valid(sat);
  const int x = 2 * sat.n_vars + static_cast<int>(sat.clauses.size());
  const int c = epsilon_congestion(x, epsilon);
  auto art = build_restricted(sat, c);
  art.kind = SourceKind::Epsilon;
  auto& inst = art.instance;
  inst.restricted = false;
  if (c > 1)
    for (int r = 0; r < x; ++r) inst.requests.push_back({inst.requests[r].t, inst.requests[r].s, c - 1});
  return art;
}

ReductionArtifact reduce_c2(const Sat31Instance& sat, std::optional<int> ratio_d) {
  require_valid(sat);
  const int nv = sat.n_vars, m = static_cast<int>(sat.clauses.size());
  int z = 0;
  if (ratio_d) {
    const int d = *ratio_d;
    if (d < 2) throw Error(Errc::BadRatio, "ratio d=" + std::to_string(d) + " must be at least 2");
    const int num = 2 * nv + 2 * m - d * m;
    if (num < 0 || num % (d - 1) != 0)
      throw Error(Errc::BadRatio, "padding (2n+2m-dm)/(d-1) = " + std::to_string(num) + "/" + std::to_string(d - 1) +
                                      " is not a non-negative integer");
    z = num / (d - 1);
  }
  const int base = kParts * nv;
  const int s_star = base, t_star = base + 1, p_star = base + 2;
  auto q = [&](int a) { return base + 3 + a; };
  const int N = base + 3 + m;

  ReductionArtifact art;
  art.kind = SourceKind::C2;
  art.sat = sat;
  auto& inst = art.instance;
  inst.graph = Digraph(N);
  auto& g = inst.graph;
  inst.names.assign(N, "");
  name_butterflies(inst.names, nv);
  inst.names[s_star] = "s*";
  inst.names[t_star] = "t*";
  inst.names[p_star] = "p*";
  for (int a = 0; a < m; ++a) inst.names[q(a)] = label("q", a + 1);

  // Right clique: queued butterflies, t* and p*.
  add_butterflies(g, nv);
  chain_butterflies(g, nv);
  const int last = bv(nv - 1, XD);
  for (int v = 0; v < base; ++v) {
    if (v == last)
      g.add_arc(v, t_star);
    else
      g.add_arc(t_star, v);
    g.add_arc(p_star, v);
  }
  g.add_arc(t_star, p_star);
  // Left clique: s* followed by the subdivision vertices of (s*, xa_1).
  g.add_arc(s_star, q(0));
  for (int a = 0; a + 1 < m; ++a) g.add_arc(q(a), q(a + 1));
  for (int b = 0; b < m; ++b) {
    for (int a = 0; a < b; ++a) g.add_arc(q(b), q(a));
    if (b > 0) g.add_arc(q(b), s_star);
  }
  // Arcs across the two cliques.
  g.add_arc(q(m - 1), bv(0, XA));
  g.add_arc(t_star, s_star);
  auto lits = literal_vertices(sat);
  for (int a = 0; a < m; ++a)
    for (int v : lits[a]) g.add_arc(v, q(a));

  for (int i = 0; i < nv; ++i) {
    inst.requests.push_back({bv(i, S), bv(i, T), 1});
    inst.requests.push_back({bv(i, SB), bv(i, TB), 1});
  }
  for (int a = 0; a < m; ++a) inst.requests.push_back({p_star, q(a), 1});
  if (m > 1) inst.requests.push_back({s_star, t_star, m - 1});
  inst.requests.push_back({t_star, s_star, 1});
  if (z > 0) inst.requests.push_back({s_star, p_star, z});
  inst.congestion = m + z;
  inst.restricted = false;
  art.sat_requests = 2 * nv + m;

  CliquePartition cp;
  std::vector<int> left{s_star}, right;
  for (int a = 0; a < m; ++a) left.push_back(q(a));
  for (int v = 0; v < N; ++v)
    if (std::find(left.begin(), left.end(), v) == left.end()) right.push_back(v);
  std::sort(left.begin(), left.end());
  cp.parts = {left, right};
  art.cliques = cp;

  art.critical_path.push_back(s_star);
  for (int a = 0; a < m; ++a) art.critical_path.push_back(q(a));
  for (int v : wing_chain(nv)) art.critical_path.push_back(v);
  art.critical_path.push_back(t_star);
  finish(art);
  return art;
}

// ---------------------------------------------------------------------------
// Witness maps

namespace {

bool is_sat_kind(SourceKind k) {
  return k == SourceKind::SatTournament || k == SourceKind::Restricted || k == SourceKind::Epsilon ||
         k == SourceKind::C2;
}

/// Splits "name_12" into ("name", 12); index -1 when there is no suffix.
std::pair<std::string, int> split_label(const std::string& s) {
  auto pos = s.rfind('_');
  if (pos == std::string::npos) return {s, -1};
  return {s.substr(0, pos), std::stoi(s.substr(pos + 1))};
}

}  // namespace

RoutedSolution sat_solution_from_assignment(const ReductionArtifact& art, const std::vector<bool>& assignment) {
  if (!is_sat_kind(art.kind) || !art.sat) throw Error(Errc::InvalidArgument, "artifact is not SAT-derived");
  const auto& sat = *art.sat;
  if (static_cast<int>(assignment.size()) != sat.n_vars)
    throw Error(Errc::InvalidArgument, "assignment has " + std::to_string(assignment.size()) + " values for " +
                                           std::to_string(sat.n_vars) + " variables");
  auto lits = literal_vertices(sat);
  std::vector<int> witness(sat.clauses.size(), -1);
  for (std::size_t a = 0; a < sat.clauses.size(); ++a) {
    for (std::size_t j = 0; j < 3 && witness[a] < 0; ++j)
      if (assignment[sat.clauses[a][j].var] == sat.clauses[a][j].positive) witness[a] = lits[a][j];
    if (witness[a] < 0) throw Error(Errc::NotSatisfying, "clause " + std::to_string(a + 1) + " is not satisfied");
  }
  const auto& inst = art.instance;
  std::vector<std::vector<int>> paths;
  for (auto [s, t] : inst.expanded()) {
    auto [src, si] = split_label(inst.names[s]);
    auto [dst, ti] = split_label(inst.names[t]);
    std::vector<int> p;
    if (src == "s" && dst == "t") {
      const int i = si - 1;
      if (assignment[i])
        p = {s, bv(i, AL), t};
      else
        p = {s, bv(i, XA), bv(i, XB), bv(i, XC), t};
    } else if (src == "sb" && dst == "tb") {
      const int i = si - 1;
      p = {s, assignment[i] ? bv(i, XD) : bv(i, AL), t};
    } else if ((src == "p" || src == "p*") && dst == "q") {
      p = {s, witness[ti - 1], t};
    } else if (src == "s*" && (dst == "t*" || dst == "p*")) {
      p = art.critical_path;
      if (dst == "p*") p.push_back(t);
    } else if (inst.graph.has_arc(s, t)) {
      p = {s, t};  // (t*, s*) and the reverse requests of the epsilon construction
    } else {
      throw Error(Errc::InvalidArgument, "no rule for request " + inst.names[s] + " -> " + inst.names[t]);
    }
    paths.push_back(std::move(p));
  }
  return RoutedSolution::from_paths(inst.n(), std::move(paths));
}

std::vector<bool> sat_assignment_from_solution(const ReductionArtifact& art, const RoutedSolution& sol) {
  if (!is_sat_kind(art.kind) || !art.sat) throw Error(Errc::InvalidArgument, "artifact is not SAT-derived");
  std::vector<Violation> bad;
  try {
    bad = verify_solution(art.instance, sol);
  } catch (const Error& e) {
    throw Error(Errc::InvalidSolution, e.reason());
  }
  if (!bad.empty()) throw Error(Errc::InvalidSolution, describe(bad));
  const auto& sat = *art.sat;
  const auto exp = art.instance.expanded();
  std::vector<bool> pi(sat.n_vars, false);
  for (int i = 0; i < sat.n_vars; ++i) {
    const int sb = bv(i, SB), tb = bv(i, TB);
    for (std::size_t r = 0; r < exp.size(); ++r)
      if (exp[r] == std::make_pair(sb, tb)) {
        const auto& p = sol.paths[r];
        pi[i] = std::find(p.begin(), p.end(), bv(i, XD)) != p.end();
        break;
      }
  }
  if (!sat.satisfied_by(pi)) throw Error(Errc::InvalidSolution, "recovered assignment does not satisfy the formula");
  return pi;
}

bool butterfly_has_busy_wing(const ReductionArtifact& art, const RoutedSolution& sol, int var) {
  if (!is_sat_kind(art.kind)) throw Error(Errc::InvalidArgument, "artifact is not SAT-derived");
  const auto occ = RoutedSolution::from_paths(art.instance.n(), sol.paths).occupancy;
  const int c = art.instance.congestion;
  auto full = [&](int part) { return occ[bv(var, part)] >= c; };
  return (full(XA) && full(XB) && full(XC)) || full(XD);
}

}  // namespace ddp

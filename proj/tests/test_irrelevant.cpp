#include "doctest.h"

#include "ddp/errors.hpp"
#include "ddp/instance.hpp"
#include "ddp/irrelevant.hpp"
#include "ddp/solver.hpp"
#include "ddp/triples.hpp"
#include "oracles.hpp"

using namespace ddp;

namespace {

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no ddp::Error thrown");
  return Errc::InvalidArgument;
}

/// A k-triple on vertices 0..3k-1 (A, then B, then C) with only the arcs the
/// definition demands, plus `extra` isolated vertices.
std::pair<Digraph, KTriple> bare_triple(int k, int extra) {
  Digraph d(3 * k + extra);
  KTriple t;
  for (int i = 0; i < k; ++i) {
    t.A.push_back(i);
    t.B.push_back(k + i);
    t.C.push_back(2 * k + i);
  }
  for (int a : t.A)
    for (int b : t.B) d.add_arc(a, b);
  for (int b : t.B)
    for (int c : t.C) d.add_arc(b, c);
  for (int i = 0; i < k; ++i) d.add_arc(t.C[i], t.A[i]);
  return {d, t};
}

bool contains(const std::vector<int>& p, int v) { return std::find(p.begin(), p.end(), v) != p.end(); }

/// Entries into X from outside A (round one property).
bool entries_from_a(const RoutedSolution& Q, const std::vector<int>& X, const KTriple& t) {
  for (const auto& p : Q.paths)
    for (std::size_t q = 1; q < p.size(); ++q)
      if (contains(X, p[q]) && !contains(t.A, p[q - 1])) return false;
  return true;
}

}  // namespace

TEST_CASE("occupancy lists") {
  Instance inst;
  inst.graph = Digraph(5);
  inst.congestion = 3;
  auto empty = compute_occupancy(inst, RoutedSolution::from_paths(5, {}));
  for (int v = 0; v < 5; ++v) {
    CHECK(empty.lists[v].empty());
    for (int i = 0; i < 4; ++i) CHECK(empty.i_free(v, i));
  }

  Occupancy occ;
  occ.c = 3;
  occ.lists = {{1, 3}};
  CHECK(occ.i_free(0, 1));
  CHECK(occ.i_free(0, 2));
  occ.lists = {{0, 1, 3}};
  CHECK(occ.i_free(0, 1));
  CHECK_FALSE(occ.i_free(0, 2));
  occ.lists = {{0, 1}, {}, {0, 1}, {2}};
  auto groups = occ.groups();
  REQUIRE(groups.size() == 2);
  CHECK(groups[0].first == std::vector<int>{0, 1});
  CHECK(groups[0].second == std::vector<int>{0, 2});
}

TEST_CASE("occupancy recount on planted instances") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    KTriple t;
    auto inst = planted_triple_instance(3, 3, 3, 2, seed, &t);
    auto sol = solve(inst, {Objective::MinTotalLength});
    if (!sol) continue;
    auto occ = compute_occupancy(inst, *sol, &t);
    for (int v = 0; v < inst.n(); ++v) {
      std::vector<int> expect;
      const bool in_k = contains(t.A, v) || contains(t.B, v) || contains(t.C, v);
      for (int i = 0; i < inst.k(); ++i)
        if (in_k && contains(sol->paths[i], v)) expect.push_back(i);
      CHECK(occ.lists[v] == expect);
      CHECK(static_cast<int>(occ.lists[v].size()) <= inst.congestion);
    }
  }
}

TEST_CASE("free pairs") {
  auto [d, t] = bare_triple(3, 0);
  Occupancy occ;
  occ.c = 1;
  occ.lists.assign(d.n(), {});
  auto first = find_free_pair(t, occ, 0);
  REQUIRE(first);
  CHECK(*first == std::make_pair(t.C[0], t.A[0]));

  for (int u : t.C) occ.lists[u] = {1};
  CHECK_FALSE(find_free_pair(t, occ, 0).has_value());
  occ.lists[t.C[2]] = {0};
  auto own = find_free_pair(t, occ, 0);
  REQUIRE(own);
  CHECK(*own == std::make_pair(t.C[2], t.A[2]));
}

TEST_CASE("common path of two full lists") {
  Occupancy occ;
  occ.c = 2;
  occ.lists = {{0, 1}, {1, 2}, {0}};
  CHECK(common_path(occ, 0, 1, 3) == 1);
  CHECK(code_of([&] { common_path(occ, 0, 1, 4); }) == Errc::InvalidArgument);
  CHECK(code_of([&] { common_path(occ, 0, 2, 3); }) == Errc::InvalidArgument);
}

TEST_CASE("default thresholds") {
  auto th = Thresholds::defaults(1, 1);
  CHECK(th.d2 == 49);
  CHECK(th.m2 == 9);
  CHECK(th.x == 2 * 49 * 9);
  CHECK(th.d1 == 35 + 8 + 882);
  CHECK(th.m1 == 8 + 882);
  CHECK(th.f == 3 * (4 + 24 + 882));
  auto h = Thresholds::defaults(2, 2, 3);
  CHECK(h.h == 3);
  auto desk = Thresholds::desk(3, 2);
  CHECK(desk.f == 3);
  CHECK(desk.x == 2);
  CHECK(desk.m1 == 1);
}

TEST_CASE("lemma bounds hold on minimum solutions") {
  int audited = 0;
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const int k = 2 + static_cast<int>(seed % 3);
    const int requests = 1 + static_cast<int>(seed % 3);
    const int c = requests / 2 + 1;
    KTriple t;
    auto inst = planted_triple_instance(k, 2 + static_cast<int>(seed % 3), requests, c, seed * 7 + 1, &t);
    auto sol = solve(inst, {Objective::MinTotalLength});
    if (!sol) continue;
    auto rep = audit_lemma_bounds(inst, t, *sol);
    CHECK(rep.ok());
    CHECK(rep.max_b_per_path <= 4);
    CHECK(rep.max_b_per_full_list <= 4);
    if (rep.lemma6_applies) {
      CHECK(rep.max_a_per_path <= 8 * c + 4);
      CHECK(rep.max_c_per_path <= 8 * c + 4);
    }
    for (int i = 0; i < inst.k(); ++i) CHECK_FALSE(find_shortcut(inst, *sol, i).has_value());
    ++audited;
  }
  CHECK(audited > 30);
}

TEST_CASE("five-crossing witness on a path crossing B five times") {
  auto [d, t] = bare_triple(5, 0);
  Instance inst;
  inst.graph = d;
  inst.requests = {{t.B[0], t.B[4], 1}};
  std::vector<int> path;
  for (int i = 0; i < 4; ++i) {
    path.push_back(t.B[i]);
    path.push_back(t.C[i]);
    path.push_back(t.A[i]);
  }
  path.push_back(t.B[4]);
  auto sol = RoutedSolution::from_paths(d.n(), {path});
  REQUIRE(verify_solution(inst, sol).empty());
  CHECK(code_of([&] { audit_lemma_bounds(inst, t, sol); }) == Errc::PreconditionFailed);

  auto rep = audit_lemma_bounds(inst, t, sol, false);
  CHECK_FALSE(rep.ok());
  CHECK(rep.max_b_per_path == 5);
  bool seen = false;
  for (const auto& w : rep.witnesses)
    if (w.bound == "lemma4") {
      seen = true;
      CHECK(w.confirmed);
      CHECK(w.improved.paths[0] == std::vector<int>{t.B[0], t.C[0], t.A[0], t.B[4]});
    }
  CHECK(seen);
}

TEST_CASE("audits need 2c > k") {
  auto inst = counterexample(2, 1, 1);
  auto sol = solve(inst);
  REQUIRE(sol);
  auto t = find_triple(inst.graph, 2);
  REQUIRE(t);
  CHECK(code_of([&] { audit_lemma_bounds(inst, *t, *sol); }) == Errc::PreconditionFailed);
  CHECK(code_of([&] { find_irrelevant_vertex(inst, *t, Thresholds::desk(2)); }) == Errc::PreconditionFailed);
  CHECK(code_of([&] { winwin_solve(inst, Thresholds::desk(2)); }) == Errc::PreconditionFailed);
}

TEST_CASE("masking removes arcs from C to B and from B to A") {
  auto [d, t] = bare_triple(2, 0);
  d.add_arc(t.C[0], t.B[1]);
  d.add_arc(t.B[0], t.A[1]);
  Instance inst;
  inst.graph = d;
  auto m = masked_instance(inst, t);
  CHECK_FALSE(m.graph.has_arc(t.C[0], t.B[1]));
  CHECK_FALSE(m.graph.has_arc(t.B[0], t.A[1]));
  CHECK(m.graph.arc_count() == d.arc_count() - 2);
}

TEST_CASE("round one with no entry into B leaves the solution alone") {
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 200 && checked < 5; ++seed) {
    KTriple t;
    auto inst = planted_triple_instance(3, 3, 1, 1, seed, &t);
    auto masked = masked_instance(inst, t);
    auto sol = solve(masked, {Objective::MinTotalLength});
    if (!sol) continue;
    bool touches = false;
    for (int b : t.B) touches = touches || sol->occupancy[b] > 0;
    if (touches) continue;
    auto plan = reroute_round1(inst, t, *sol, Thresholds::desk(3, 1, 0));
    CHECK(plan.round1_branch == "empty");
    CHECK(plan.X.size() == 3);
    CHECK(plan.Q == *sol);
    CHECK(plan.edits.empty());
    reroute_round2(inst, t, plan, Thresholds::desk(3, 1, 0, 1, 0));
    CHECK(plan.Q_prime == plan.Q);
    ++checked;
  }
  CHECK(checked == 5);
}

TEST_CASE("round one R rule, round two R' rule and the final step") {
  // a 0-3, b 4-7, c 8-11, then s = 12, v = 13, t = 14, y = 15.
  auto [d, t] = bare_triple(4, 4);
  const int s = 12, v = 13, tt = 14, y = 15;
  for (auto [p, q] : std::vector<std::pair<int, int>>{{s, v}, {v, 4}, {v, 5}, {v, 6}, {4, tt}, {5, tt}, {y, 6}})
    d.add_arc(p, q);
  Instance inst;
  inst.graph = d;
  inst.requests = {{s, tt, 1}};
  auto sol = RoutedSolution::from_paths(d.n(), {{s, v, 4, tt}});
  REQUIRE(verify_solution(inst, sol).empty());

  auto th = Thresholds::desk(4, 2, 2, 1, 1, 1);
  auto plan = reroute_round1(inst, t, sol, th);
  CHECK(plan.round1_branch == "empty");
  CHECK(plan.X == std::vector<int>{4, 5, 7});
  REQUIRE(plan.edits.size() == 1);
  CHECK(plan.edits[0].rule == "R");
  CHECK(plan.Q.paths[0] == std::vector<int>{s, v, 6, 8, 0, 4, tt});
  CHECK(entries_from_a(plan.Q, plan.X, t));

  reroute_round2(inst, t, plan, th);
  CHECK(plan.round2_branch == "empty");
  CHECK(plan.special == 4);
  REQUIRE(plan.edits.size() == 2);
  CHECK(plan.edits[1].rule == "R'");
  CHECK(plan.Q_prime.paths[0] == std::vector<int>{s, v, 6, 8, 0, 4, 9, 1, 5, tt});

  reroute_final(inst, t, plan);
  CHECK(plan.final_solution.paths[0] == std::vector<int>{s, v, 6, 8, 0, 7, 9, 1, 5, tt});
  CHECK(plan.final_solution.occupancy[4] == 0);
  CHECK(verify_solution(inst, plan.final_solution).empty());
}

TEST_CASE("round one S rule through Gamma") {
  // a 0-3, b 4-7, c 8-11, then s = 12, v = 13, w = 14, z = 15, y = 16, t = 17.
  auto [d, t] = bare_triple(4, 6);
  const int s = 12, v = 13, w = 14, z = 15, y = 16, tt = 17;
  for (auto [p, q] : std::vector<std::pair<int, int>>{{s, v},
                                                      {v, 4},
                                                      {4, tt},
                                                      {6, tt},
                                                      {v, w},
                                                      {w, 5},
                                                      {v, z},
                                                      {z, 6},
                                                      {w, z},
                                                      {y, 7},
                                                      {v, y},
                                                      {w, y},
                                                      {z, y}})
    d.add_arc(p, q);
  Instance inst;
  inst.graph = d;
  inst.requests = {{s, tt, 1}};
  auto sol = RoutedSolution::from_paths(d.n(), {{s, v, 4, tt}});
  REQUIRE(verify_solution(inst, sol).empty());

  auto th = Thresholds::desk(4, 1, 3, 1, 1, 1);
  auto plan = reroute_round1(inst, t, sol, th);
  CHECK(plan.round1_branch == "gamma");
  CHECK(plan.X == std::vector<int>{4});
  CHECK(plan.gamma.size() == 6);
  REQUIRE(plan.edits.size() == 1);
  CHECK(plan.edits[0].rule == "S");
  CHECK(plan.edits[0].matching == std::vector<std::pair<int, int>>{{v, 4}, {w, 5}});
  CHECK(plan.Q.paths[0] == std::vector<int>{s, v, w, 5, 8, 0, 4, tt});
  CHECK(entries_from_a(plan.Q, plan.X, t));

  reroute_round2(inst, t, plan, th);
  CHECK(plan.special == 4);
  CHECK(plan.Q_prime.paths[0] == std::vector<int>{s, v, w, 5, 8, 0, 4, 9, 1, 6, tt});
  reroute_final(inst, t, plan);
  CHECK(plan.final_solution.occupancy[4] == 0);
  CHECK(verify_solution(inst, plan.final_solution).empty());
}

TEST_CASE("round two picks the special vertex through Gamma'") {
  // a 0-2, b 3-5, c 6-8, then exits p1 = 9, p2 = 10, p3 = 11.
  auto [d, t] = bare_triple(3, 3);
  for (auto [p, q] : std::vector<std::pair<int, int>>{{3, 9}, {4, 10}, {5, 11}, {10, 9}, {11, 9}, {10, 11}})
    d.add_arc(p, q);
  Instance inst;
  inst.graph = d;
  ReroutePlan plan;
  plan.X = {3, 4, 5};
  select_special(inst, t, Thresholds::desk(3, 1, 1, 1, 2, 1), plan);
  CHECK(plan.round2_branch == "gamma");
  CHECK(plan.special == 3);
  CHECK(plan.gamma_prime == std::vector<std::pair<int, int>>{{4, 3}, {4, 5}, {5, 3}});
  plan.special = -1;
  CHECK(code_of([&] { select_special(inst, t, Thresholds::desk(3, 1, 1, 1, 2, 2), plan); }) == Errc::TripleTooSmall);
}

TEST_CASE("round one reports a triple below x") {
  auto [d, t] = bare_triple(2, 2);
  d.add_arc(6, 7);
  Instance inst;
  inst.graph = d;
  inst.requests = {{6, 7, 1}};
  auto sol = RoutedSolution::from_paths(d.n(), {{6, 7}});
  CHECK(code_of([&] { reroute_round1(inst, t, sol, Thresholds::desk(2, 3)); }) == Errc::TripleTooSmall);
}

TEST_CASE("asymmetric counterexample: the special vertex is irrelevant") {
  for (int n = 2; n <= 3; ++n) {
    auto inst = counterexample_asymmetric(n);
    const Bits term = inst.terminals();
    std::vector<int> keep;
    for (int v = 0; v < inst.n(); ++v)
      if (!term.test(v)) keep.push_back(v);
    auto local = find_triple(inst.graph.induced(keep), n);
    REQUIRE(local);
    KTriple t;
    for (int a : local->A) t.A.push_back(keep[a]);
    for (int b : local->B) t.B.push_back(keep[b]);
    for (int c : local->C) t.C.push_back(keep[c]);
    auto res = find_irrelevant_vertex(inst, t, Thresholds::desk(n));
    REQUIRE(res.vertex >= 0);
    CHECK(res.oracle_checked);
    CHECK(res.oracle_irrelevant);
    CHECK_FALSE(is_relevant(inst, res.vertex));
    CHECK(oracle::feasible(delete_vertex(inst, res.vertex)));
    CHECK(res.trace.front().rfind("triple ", 0) == 0);
  }
}

TEST_CASE("infeasible instance: any returned vertex is irrelevant") {
  int returned = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    KTriple t;
    auto inst = planted_triple_instance(3, 3, 1, 1, seed, &t);
    const int target = inst.requests[0].t;
    for (int u = 0; u < inst.n(); ++u) inst.graph.remove_arc(u, target);
    REQUIRE_FALSE(oracle::feasible(inst));
    try {
      auto res = find_irrelevant_vertex(inst, t, Thresholds::desk(3, 1));
      CHECK(res.oracle_irrelevant);
      CHECK_FALSE(is_relevant(inst, res.vertex));
      ++returned;
    } catch (const Error& e) {
      CHECK(e.code() == Errc::TripleTooSmall);
    }
  }
  CHECK(returned > 0);
}

TEST_CASE("winwin on instances without a large triple") {
  auto inst = random_instance(7, 0.2, 1, 1, 4);
  auto res = winwin_solve(inst, Thresholds::desk(4));
  CHECK(res.deleted.empty());
  CHECK(res.solution.has_value() == oracle::feasible(inst));
  CHECK(res.trace.back().rfind("verdict ", 0) == 0);
  CHECK(res.final_width >= 0);
}

TEST_CASE("winwin deletes irrelevant vertices and keeps the verdict") {
  auto asym = counterexample_asymmetric(3);
  auto res = winwin_solve(asym, Thresholds::desk(2));
  CHECK_FALSE(res.deleted.empty());
  REQUIRE(res.solution);
  CHECK(verify_solution(asym, *res.solution).empty());
  for (int v : res.deleted) CHECK(res.solution->occupancy[v] == 0);

  int deleting = 0;
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    KTriple t;
    const int requests = 1 + static_cast<int>(seed % 2);
    auto inst = planted_triple_instance(3, 2, requests, requests, seed + 100, &t);
    auto r = winwin_solve(inst, Thresholds::desk(3));
    CHECK(r.solution.has_value() == oracle::feasible(inst));
    // Replaying the deletions one at a time never changes feasibility.
    Instance cur = inst;
    std::vector<int> idx(inst.n());
    std::iota(idx.begin(), idx.end(), 0);
    for (int v : r.deleted) {
      const int local = static_cast<int>(std::find(idx.begin(), idx.end(), v) - idx.begin());
      CHECK_FALSE(is_relevant(cur, local));
      cur = delete_vertex(cur, local);
      idx.erase(idx.begin() + local);
    }
    deleting += !r.deleted.empty();
  }
  CHECK(deleting > 0);
}

TEST_CASE("winwin input checks") {
  auto inst = random_instance(6, 0.0, 1, 1, 2);
  inst.restricted = true;
  CHECK(code_of([&] { winwin_solve(inst, Thresholds::desk(2)); }) == Errc::RestrictedUnsupported);
  inst.restricted = false;
  inst.graph.remove_arc(inst.graph.arcs().front().first, inst.graph.arcs().front().second);
  CHECK(code_of([&] { winwin_solve(inst, Thresholds::desk(2)); }) == Errc::InvalidArgument);
}

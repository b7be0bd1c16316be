#include "doctest.h"

#include "ddp/errors.hpp"
#include "ddp/instance.hpp"
#include "ddp/solver.hpp"
#include "oracles.hpp"

using namespace ddp;

namespace {

Digraph transitive(int n) {
  Digraph d(n);
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) d.add_arc(u, v);
  return d;
}

std::vector<int> inner_vertices(const Instance& inst) {
  std::vector<int> out;
  const Bits term = inst.terminals();
  for (int v = 0; v < inst.n(); ++v)
    if (!term.test(v)) out.push_back(v);
  return out;
}

}  // namespace

TEST_CASE("single arc request") {
  Instance inst;
  inst.graph = Digraph(2);
  inst.graph.add_arc(0, 1);
  inst.requests = {{0, 1, 1}};
  auto sol = solve(inst, {Objective::MinTotalLength});
  REQUIRE(sol);
  CHECK(sol->paths == std::vector<std::vector<int>>{{0, 1}});
  CHECK(sol->total_length() == 2);
}

TEST_CASE("counterexample paths are forced") {
  auto inst = counterexample(2, 1, 1);
  CounterexampleLayout L{2, 1};
  auto sol = solve(inst);
  REQUIRE(sol);
  CHECK(verify_solution(inst, *sol).empty());
  std::vector<int> pu, pv;
  for (int i = 1; i <= 6; ++i) pu.push_back(L.u(0, i));
  for (int i = 6; i >= 1; --i) pv.push_back(L.v(0, i));
  CHECK(sol->paths[0] == pu);
  CHECK(sol->paths[1] == pv);
  auto all = enumerate_solutions(inst);
  CHECK(all.size() == 1);
}

TEST_CASE("solve agrees with the brute-force oracle") {
  int feasible = 0, total = 0;
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    const int n = 3 + static_cast<int>(seed % 5);
    const int k = 1 + static_cast<int>(seed % 3);
    const int c = 1 + static_cast<int>((seed / 3) % 2);
    auto inst = random_instance(n, 0.2, k, c, seed);
    if (seed % 4 == 0) {
      // Thin out the digraph so infeasible cases occur.
      for (auto [u, v] : inst.graph.arcs())
        if ((u * 7 + v * 3 + static_cast<int>(seed)) % 3 == 0) inst.graph.remove_arc(u, v);
    }
    inst.restricted = seed % 5 == 0;
    const bool expect = oracle::feasible(inst);
    auto any = solve(inst);
    auto min = solve(inst, {Objective::MinTotalLength});
    CHECK(any.has_value() == expect);
    CHECK(min.has_value() == expect);
    if (any) CHECK(verify_solution(inst, *any).empty());
    if (min) {
      CHECK(verify_solution(inst, *min).empty());
      CHECK(min->total_length() <= any->total_length());
      CHECK(is_minimal(inst, *min));
    }
    feasible += expect;
    ++total;
  }
  CHECK(feasible > 10);
  CHECK(feasible < total);
}

TEST_CASE("min-mode total length matches exhaustive enumeration") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    auto inst = random_instance(5, 0.3, 2, 1 + static_cast<int>(seed % 2), seed);
    auto all = enumerate_solutions(inst);
    auto min = solve(inst, {Objective::MinTotalLength});
    CHECK(min.has_value() == !all.empty());
    if (!min) continue;
    std::size_t best = SIZE_MAX;
    for (const auto& s : all) {
      CHECK(verify_solution(inst, s).empty());
      best = std::min(best, s.total_length());
    }
    CHECK(min->total_length() == best);
  }
}

TEST_CASE("enumeration") {
  Instance inst;
  inst.graph = transitive(3);
  inst.requests = {{0, 2, 1}};
  auto all = enumerate_solutions(inst);
  REQUIRE(all.size() == 2);
  CHECK(all[0].paths[0] == std::vector<int>{0, 1, 2});
  CHECK(all[1].paths[0] == std::vector<int>{0, 2});

  inst.requests = {{2, 0, 1}};
  CHECK(enumerate_solutions(inst).empty());

  // Identical requests are listed once per multiset of paths.
  inst.requests = {{0, 2, 2}};
  inst.congestion = 2;
  CHECK(enumerate_solutions(inst).size() == 3);

  SolveMode capped{Objective::EnumerateAll};
  capped.max_solutions = 1;
  CHECK_THROWS_AS(enumerate_solutions(inst, capped), Error);
}

TEST_CASE("counterexample n = 1 solutions use every inner vertex") {
  for (int c = 1; c <= 2; ++c) {
    auto inst = counterexample(1, c, 1);
    auto all = enumerate_solutions(inst);
    REQUIRE_FALSE(all.empty());
    for (const auto& s : all)
      for (int v = 0; v < inst.n(); ++v) CHECK(s.occupancy[v] == c);
  }
}

TEST_CASE("shortcuts") {
  Instance inst;
  inst.graph = transitive(4);
  inst.requests = {{0, 3, 1}};
  auto longer = RoutedSolution::from_paths(4, {{0, 1, 2, 3}});
  auto sc = find_shortcut(inst, longer, 0);
  REQUIRE(sc);
  CHECK(sc->from == 0);
  CHECK(sc->to == 3);
  CHECK(sc->walk == std::vector<int>{0, 3});
  CHECK(apply_shortcut(longer.paths[0], *sc) == std::vector<int>{0, 3});
  CHECK_FALSE(is_minimal(inst, longer));
  CHECK(is_minimal(inst, RoutedSolution::from_paths(4, {{0, 3}})));
  CHECK(loop_erase({0, 1, 2, 1, 3}) == std::vector<int>{0, 1, 3});
  CHECK(loop_erase({4, 5, 4}) == std::vector<int>{4});
}

TEST_CASE("shortcut respects congestion unless told otherwise") {
  // 0 -> 1 -> 2 -> 3 plus a detour 0 -> 4 -> 3 whose middle is saturated.
  Instance inst;
  inst.graph = Digraph(6);
  for (auto [u, v] : std::vector<std::pair<int, int>>{{0, 1}, {1, 2}, {2, 3}, {0, 4}, {4, 3}, {5, 4}})
    inst.graph.add_arc(u, v);
  inst.requests = {{0, 3, 1}, {5, 4, 1}};
  auto sol = RoutedSolution::from_paths(6, {{0, 1, 2, 3}, {5, 4}});
  CHECK_FALSE(find_shortcut(inst, sol, 0).has_value());
  auto loose = find_shortcut(inst, sol, 0, false);
  REQUIRE(loose);
  CHECK(loose->walk == std::vector<int>{0, 4, 3});
}

TEST_CASE("min-mode solutions have no shortcut") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    auto inst = random_instance(6, 0.3, 1 + static_cast<int>(seed % 3), 1 + static_cast<int>(seed % 2), seed + 500);
    auto min = solve(inst, {Objective::MinTotalLength});
    if (!min) continue;
    for (int i = 0; i < inst.k(); ++i) CHECK_FALSE(find_shortcut(inst, *min, i).has_value());
  }
}

TEST_CASE("relevance") {
  auto inst = counterexample(2, 1, 1);
  for (int v : inner_vertices(inst)) CHECK(is_relevant(inst, v));
  CHECK_THROWS_AS(is_relevant(inst, CounterexampleLayout{2, 1}.u(0, 1)), Error);

  auto asym = counterexample_asymmetric(2);
  CounterexampleLayout L{2, 1};
  CHECK_FALSE(is_relevant(asym, L.u(0, 3)));
  CHECK_FALSE(is_relevant(asym, L.u(0, 5)));

  Instance dead;
  dead.graph = transitive(4);
  dead.requests = {{3, 0, 1}};
  CHECK_FALSE(is_relevant(dead, 1));
}

TEST_CASE("budget is reported separately from infeasibility") {
  auto inst = counterexample(2, 2, 2);
  SolveMode tiny;
  tiny.node_limit = 1;
  try {
    solve(inst, tiny);
    FAIL("expected BudgetExceeded");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::BudgetExceeded);
  }
}

TEST_CASE("raising congestion keeps solutions valid") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    auto inst = random_instance(6, 0.1, 3, 1, seed + 900);
    auto sol = solve(inst);
    if (!sol) continue;
    Instance more = inst;
    more.congestion = 2;
    CHECK(verify_solution(more, *sol).empty());
    CHECK(solve(more).has_value());
  }
}

#include "doctest.h"

#include <map>

#include "ddp/errors.hpp"
#include "ddp/instance.hpp"
#include "ddp/pathwidth.hpp"
#include "ddp/reductions.hpp"
#include "ddp/solver.hpp"
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

/// Satisfiability by evaluating every assignment, independent of the library.
bool satisfiable(const Sat31Instance& sat) {
  for (int mask = 0; mask < (1 << sat.n_vars); ++mask) {
    bool all = true;
    for (const auto& cl : sat.clauses) {
      bool any = false;
      for (const auto& l : cl) any = any || (((mask >> l.var) & 1) == (l.positive ? 1 : 0));
      all = all && any;
    }
    if (all) return true;
  }
  return false;
}

/// Simple s-t paths avoiding every terminal other than s and t.
std::vector<std::vector<int>> terminal_free_paths(const Instance& inst, int s, int t) {
  const Bits term = inst.terminals();
  std::vector<bool> banned(inst.n(), false);
  for (int v = 0; v < inst.n(); ++v) banned[v] = term.test(v) && v != s && v != t;
  return oracle::simple_paths(inst.graph, s, t, banned);
}

void check_round_trip(const ReductionArtifact& art) {
  auto pi = sat_brute_force(*art.sat);
  REQUIRE(pi);
  auto sol = sat_solution_from_assignment(art, *pi);
  CHECK(verify_solution(art.instance, sol).empty());
  auto back = sat_assignment_from_solution(art, sol);
  CHECK(art.sat->satisfied_by(back));
}

}  // namespace

TEST_CASE("random_sat31") {
  auto sat = random_sat31(3, 1);
  CHECK(sat.clauses.size() == 4);
  CHECK(sat.check().empty());
  std::vector<int> pos(3, 0), neg(3, 0);
  for (const auto& cl : sat.clauses)
    for (const auto& l : cl) (l.positive ? pos : neg)[l.var]++;
  CHECK(pos == std::vector<int>{3, 3, 3});
  CHECK(neg == std::vector<int>{1, 1, 1});
  CHECK(random_sat31(6, 42) == random_sat31(6, 42));
  CHECK(random_sat31(6, 42).check().empty());
  CHECK(code_of([] { random_sat31(4, 0); }) == Errc::BadArity);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto s = random_sat31(3, seed);
    CHECK(sat_brute_force(s).has_value() == satisfiable(s));
  }
}

TEST_CASE("tournament reduction structure and equivalence") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto sat = random_sat31(3, seed);
    auto art = reduce_sat_to_tournament(sat);
    CHECK(art.instance.n() == 35);
    CHECK(art.instance.k() == 10);
    CHECK(art.instance.congestion == 1);
    CHECK(is_tournament(art.instance.graph));
    CHECK(art.label(art.vertex("alpha_2")) == "alpha_2");
    // Among butterfly vertices, p_a reaches only its three literal vertices.
    for (int a = 1; a <= 4; ++a) {
      int outs = 0;
      for_each_bit(art.instance.graph.out(art.vertex("p_" + std::to_string(a))), [&](int v) { outs += v < 27; });
      CHECK(outs == 3);
    }
    auto sol = solve(art.instance);
    CHECK(sol.has_value() == satisfiable(sat));
    if (sol) {
      CHECK(sat.satisfied_by(sat_assignment_from_solution(art, *sol)));
      for (int i = 0; i < 3; ++i) CHECK(butterfly_has_busy_wing(art, *sol, i));
    }
    check_round_trip(art);
  }
}

TEST_CASE("assignment map errors") {
  auto sat = random_sat31(3, 3);
  auto art = reduce_sat_to_tournament(sat);
  // Find an assignment that fails a clause.
  std::vector<bool> bad;
  for (int mask = 0; mask < 8 && bad.empty(); ++mask) {
    std::vector<bool> pi{bool(mask & 1), bool(mask & 2), bool(mask & 4)};
    if (!sat.satisfied_by(pi)) bad = pi;
  }
  REQUIRE_FALSE(bad.empty());
  CHECK(code_of([&] { sat_solution_from_assignment(art, bad); }) == Errc::NotSatisfying);

  auto good = sat_solution_from_assignment(art, *sat_brute_force(sat));
  for (const auto& p : good.paths)
    if (art.label(p.front()).rfind("p_", 0) == 0) CHECK(p.size() == 3);
  auto tampered = good;
  tampered.paths[0] = {tampered.paths[0].front(), tampered.paths[0].back()};
  tampered = RoutedSolution::from_paths(art.instance.n(), tampered.paths);
  CHECK(code_of([&] { sat_assignment_from_solution(art, tampered); }) == Errc::InvalidSolution);
}

TEST_CASE("restricted reduction") {
  auto sat = random_sat31(3, 0);
  auto art = reduce_restricted(sat, 2);
  const auto& inst = art.instance;
  CHECK(inst.restricted);
  CHECK(inst.k() == 20);
  CHECK(inst.congestion * 2 == inst.k());
  auto paths = terminal_free_paths(inst, art.vertex("s*"), art.vertex("t*"));
  REQUIRE(paths.size() == 1);
  CHECK(paths[0] == art.critical_path);
  auto sol = solve(inst);
  CHECK(sol.has_value() == satisfiable(sat));
  check_round_trip(art);
  CHECK(code_of([&] { reduce_restricted(sat, 1); }) == Errc::BadRatio);
  CHECK(code_of([&] { reduce_restricted(sat, 4); }) == Errc::BadRatio);  // 10 is not divisible by 3
}

TEST_CASE("epsilon reduction") {
  auto sat = random_sat31(3, 1);
  auto zero = reduce_epsilon(sat, 0.0);
  CHECK(zero.instance.congestion == 1);
  CHECK_FALSE(zero.instance.restricted);
  auto half = reduce_epsilon(sat, 0.5);
  const int x = 10;
  CHECK(half.instance.congestion == x + 1);
  CHECK(half.instance.k() == (x + 1) * (x + 1));
  CHECK(epsilon_congestion(x, 0.5) == x + 1);
  CHECK(solve(half.instance).has_value() == satisfiable(sat));
  check_round_trip(half);
  CHECK_THROWS_AS(reduce_epsilon(sat, 1.0), Error);
}

TEST_CASE("two-clique reduction") {
  auto sat = random_sat31(3, 2);
  auto art = reduce_c2(sat);
  REQUIRE(art.cliques);
  CHECK(art.cliques->parts.size() == 2);
  CHECK(verify_clique_partition(art.instance.graph, *art.cliques).empty());
  CHECK(art.instance.congestion == 4);
  CHECK(solve(art.instance).has_value() == satisfiable(sat));
  check_round_trip(art);

  auto ratio = reduce_c2(sat, 2);
  CHECK(ratio.instance.k() == 2 * ratio.instance.congestion);
  CHECK(ratio.instance.congestion == 4 + 2 * 3);
  CHECK(code_of([&] { reduce_c2(sat, 5); }) == Errc::BadRatio);
}

TEST_CASE("clique reduction structure") {
  std::vector<int> planted;
  auto mcc = random_mcc(2, 2, 0.5, 3, true, &planted);
  CHECK(mcc.check().empty());
  auto art = reduce_mcc(mcc);
  CHECK(art.instance.k() == 13);
  CHECK(art.instance.congestion == 1);
  REQUIRE(art.cliques);
  CHECK(art.cliques->parts.size() == 14);
  CHECK(verify_clique_partition(art.instance.graph, *art.cliques).empty());
  REQUIRE(art.decomposition);
  CHECK(validate_decomposition(art.instance.graph, *art.decomposition).ok);
  CHECK(width(*art.decomposition) == 2);

  auto sol = mcc_solution_from_clique(art, planted);
  CHECK(verify_solution(art.instance, sol).empty());
  auto clique = mcc_clique_from_solution(art, sol);
  CHECK(clique == planted);

  auto found = solve(art.instance, {Objective::MinTotalLength});
  REQUIRE(found);
  auto c2 = mcc_clique_from_solution(art, *found);
  CHECK(mcc.has_edge(c2[0], c2[1]));

  auto dp = dp_solve(art.instance, *art.decomposition);
  CHECK(dp.has_value());
}

TEST_CASE("clique reduction errors and the empty case") {
  auto none = random_mcc(2, 2, 0.0, 1, false);
  CHECK_FALSE(mcc_brute_force(none).has_value());
  auto art = reduce_mcc(none);
  CHECK_FALSE(solve(art.instance).has_value());
  CHECK(code_of([&] { mcc_solution_from_clique(art, {none.classes[0][0], none.classes[1][0]}); }) == Errc::NotAClique);
  CHECK(code_of([&] { mcc_solution_from_clique(art, {none.classes[0][0]}); }) == Errc::NotAClique);

  MccInstance uneven{{{0, 1}, {2}}, {}};
  CHECK(code_of([&] { reduce_mcc(uneven); }) == Errc::UnequalClasses);

  std::vector<int> planted;
  auto mcc = random_mcc(2, 2, 0.5, 4, true, &planted);
  auto good = reduce_mcc(mcc);
  auto sol = mcc_solution_from_clique(good, planted);
  // Lengthen one path through one or two free vertices so it admits a shortcut.
  const auto& g = good.instance.graph;
  bool lengthened = false;
  for (std::size_t i = 0; i < sol.paths.size() && !lengthened; ++i) {
    auto& p = sol.paths[i];
    for (std::size_t j = 0; j + 1 < p.size() && !lengthened; ++j)
      for (int w = 0; w < g.n() && !lengthened; ++w) {
        if (sol.occupancy[w] != 0 || !g.has_arc(p[j], w)) continue;
        if (g.has_arc(w, p[j + 1])) {
          p.insert(p.begin() + j + 1, w);
          lengthened = true;
        }
        for (int x = 0; x < g.n() && !lengthened; ++x)
          if (x != w && sol.occupancy[x] == 0 && g.has_arc(w, x) && g.has_arc(x, p[j + 1])) {
            p.insert(p.begin() + j + 1, {w, x});
            lengthened = true;
          }
      }
  }
  REQUIRE(lengthened);
  sol = RoutedSolution::from_paths(good.instance.n(), sol.paths);
  REQUIRE(verify_solution(good.instance, sol).empty());
  CHECK(code_of([&] { mcc_clique_from_solution(good, sol); }) == Errc::NotMinimal);
}

TEST_CASE("three-class planted clique") {
  std::vector<int> planted;
  auto mcc = random_mcc(3, 2, 0.4, 8, true, &planted);
  auto art = reduce_mcc(mcc);
  CHECK(art.instance.k() == 21);
  auto sol = mcc_solution_from_clique(art, planted);
  CHECK(sol.paths.size() == 21);
  CHECK(verify_solution(art.instance, sol).empty());
  CHECK(mcc_clique_from_solution(art, sol) == planted);
}

TEST_CASE("congested clique extension") {
  std::vector<int> planted;
  auto mcc = random_mcc(2, 2, 0.5, 3, true, &planted);
  auto base = reduce_mcc(mcc);
  auto ext = mcc_congested_extension(base, 2);
  CHECK(ext.instance.n() == base.instance.n() + 2);
  CHECK(ext.instance.k() == base.instance.k() + 1);
  CHECK(ext.instance.congestion == 2);
  auto route = mcc_near_hamiltonian_path(ext);
  auto paths = oracle::simple_paths(ext.instance.graph, ext.vertex("z_s"), ext.vertex("z_t"),
                                    std::vector<bool>(ext.instance.n(), false));
  REQUIRE(paths.size() == 1);
  CHECK(paths[0] == route);
  REQUIRE(ext.decomposition);
  CHECK(validate_decomposition(ext.instance.graph, *ext.decomposition).ok);
  CHECK(width(*ext.decomposition) == 2);
  CHECK(solve(ext.instance).has_value());
  CHECK(code_of([&] { mcc_congested_extension(base, 1); }) == Errc::InvalidArgument);
}

TEST_CASE("congestion blowup") {
  auto inst = random_instance(5, 0.2, 2, 1, 3);
  auto same = congestion_blowup(inst);
  CHECK(same.graph == inst.graph);
  CHECK(same.requests == inst.requests);

  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto src = random_instance(4 + static_cast<int>(seed % 3), 0.2, 2, 2 + static_cast<int>(seed % 2), seed + 70);
    auto big = congestion_blowup(src);
    CHECK(big.congestion == 1);
    CHECK(big.n() == src.n() * src.congestion);
    CHECK(is_semicomplete(big.graph));
    CHECK(solve(big).has_value() == oracle::feasible(src));
  }
  Instance restricted = inst;
  restricted.restricted = true;
  CHECK(code_of([&] { congestion_blowup(restricted); }) == Errc::RestrictedUnsupported);
}

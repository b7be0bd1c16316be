#include "doctest.h"

#include "ddp/errors.hpp"
#include "ddp/instance.hpp"
#include "ddp/rng.hpp"
#include "ddp/triples.hpp"

using namespace ddp;

namespace {

/// Definition checked arc by arc, independent of validate_triple.
bool is_triple(const Digraph& d, const KTriple& t) {
  const int k = static_cast<int>(t.B.size());
  if (static_cast<int>(t.A.size()) != k || static_cast<int>(t.C.size()) != k || k == 0) return false;
  std::vector<int> seen(d.n(), 0);
  for (const auto* part : {&t.A, &t.B, &t.C})
    for (int v : *part) {
      if (v < 0 || v >= d.n() || seen[v]++) return false;
    }
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      if (!d.has_arc(t.A[i], t.B[j]) || !d.has_arc(t.B[i], t.C[j])) return false;
  for (int i = 0; i < k; ++i)
    if (!d.has_arc(t.C[i], t.A[i])) return false;
  return true;
}

/// The 4-triple drawing: a_i -> b_j -> c_l for all indices, c_i -> a_i.
std::pair<Digraph, KTriple> drawn_triple() {
  Digraph d(12);
  KTriple t{{0, 1, 2, 3}, {4, 5, 6, 7}, {8, 9, 10, 11}};
  for (int a : t.A)
    for (int b : t.B) d.add_arc(a, b);
  for (int b : t.B)
    for (int c : t.C) d.add_arc(b, c);
  for (int i = 0; i < 4; ++i) d.add_arc(t.C[i], t.A[i]);
  return {d, t};
}

}  // namespace

TEST_CASE("validate_triple") {
  auto [d, t] = drawn_triple();
  CHECK(validate_triple(d, t).ok);
  CHECK(t.mat(9) == 1);
  CHECK(t.mat_inverse(3) == 11);
  CHECK_THROWS_AS(t.mat(0), Error);

  Digraph cut = d;
  cut.remove_arc(9, 1);
  auto v = validate_triple(cut, t);
  CHECK_FALSE(v.ok);
  CHECK(v.condition == "arc");
  CHECK(v.arc_tail == 9);
  CHECK(v.arc_head == 1);

  KTriple overlap = t;
  overlap.B[0] = overlap.A[0];
  auto o = validate_triple(d, overlap);
  CHECK(o.condition == "disjoint");
  CHECK(o.vertex == 0);

  KTriple uneven = t;
  uneven.C.pop_back();
  CHECK(validate_triple(d, uneven).condition == "size");
  KTriple outside = t;
  outside.A[0] = 40;
  CHECK(validate_triple(d, outside).condition == "range");
}

TEST_CASE("validate_triple matches the arc-by-arc definition") {
  SplitMix64 rng(13);
  int accepted = 0;
  for (int trial = 0; trial < 300; ++trial) {
    auto [d, t] = plant_triple(1 + static_cast<int>(rng.below(3)), static_cast<int>(rng.below(3)), rng.next());
    // Perturb: drop a random arc, or swap a vertex between parts.
    if (rng.chance(0.5)) {
      auto arcs = d.arcs();
      auto [u, v] = arcs[rng.below(arcs.size())];
      d.remove_arc(u, v);
    }
    if (rng.chance(0.3)) std::swap(t.A[0], t.C[t.k() - 1]);
    if (rng.chance(0.2)) t.B[0] = t.A[0];
    CHECK(validate_triple(d, t).ok == is_triple(d, t));
    accepted += is_triple(d, t);
  }
  CHECK(accepted > 50);
}

TEST_CASE("find_triple") {
  auto [d, t] = drawn_triple();
  auto found = find_triple(d, 4);
  REQUIRE(found);
  CHECK(is_triple(d, *found));

  Digraph trans(10);
  for (int u = 0; u < 10; ++u)
    for (int v = u + 1; v < 10; ++v) trans.add_arc(u, v);
  TripleSearch search;
  CHECK_FALSE(find_triple(trans, 2, &search).has_value());
  CHECK(search.exact);
  CHECK(search.b_sets == 45);

  auto ce = counterexample(2, 1, 1);
  auto t2 = find_triple(ce.graph, 2);
  REQUIRE(t2);
  CHECK(is_triple(ce.graph, *t2));
}

TEST_CASE("find_triple on planted instances") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto [d, planted] = plant_triple(3, 2, seed);
    CHECK(is_triple(d, planted));
    auto found = find_triple(d, 3);
    REQUIRE(found);
    CHECK(is_triple(d, *found));
  }
  auto [d4, t4] = plant_triple(4, 6, 1);
  CHECK(d4.n() == 18);
  TripleSearch s;
  auto f4 = find_triple(d4, 4, &s);
  REQUIRE(f4);
  CHECK(is_triple(d4, *f4));
}

TEST_CASE("find_triple is independent of the worker count") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto d = random_semicomplete(12, 0.2, seed);
    TripleSearch one{1}, four{4};
    auto a = find_triple(d, 2, &one);
    auto b = find_triple(d, 2, &four);
    CHECK(a == b);
    CHECK(one.exact == four.exact);
  }
}

TEST_CASE("plant_triple") {
  auto [d, t] = plant_triple(2, 0, 4);
  CHECK(d.n() == 6);
  CHECK(is_semicomplete(d));
  CHECK(is_triple(d, t));
  auto again = plant_triple(2, 0, 4);
  CHECK(again.first == d);
  CHECK(again.second == t);

  KTriple where;
  auto inst = planted_triple_instance(3, 3, 2, 2, 9, &where);
  CHECK(inst.n() == 12);
  CHECK(inst.k() == 2);
  CHECK(inst.congestion == 2);
  CHECK(is_triple(inst.graph, where));
  const Bits term = inst.terminals();
  for (const auto* part : {&where.A, &where.B, &where.C})
    for (int v : *part) CHECK_FALSE(term.test(v));
}

TEST_CASE("triple format") {
  auto [d, t] = drawn_triple();
  auto text = write_triple(t);
  CHECK(text.rfind("ktriple 1\n", 0) == 0);
  CHECK(read_triple(text, d.n()) == t);
  CHECK_THROWS_AS(read_triple("ktriple 1\n0 1\n2 3\n4\n", 6), Error);
  CHECK_THROWS_AS(read_triple("ktriple 1\n0\n1\n9\n", 6), Error);
}

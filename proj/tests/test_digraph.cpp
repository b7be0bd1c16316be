#include "doctest.h"

#include "ddp/digraph.hpp"
#include "ddp/errors.hpp"
#include "ddp/instance.hpp"
#include "ddp/rng.hpp"

using namespace ddp;

namespace {

Digraph from_arcs(int n, std::initializer_list<std::pair<int, int>> arcs) {
  Digraph d(n);
  for (auto [u, v] : arcs) d.add_arc(u, v);
  return d;
}

/// Subset search for the largest independent set, for n <= 12.
int brute_independence(const Digraph& d) {
  int best = 0;
  for (int mask = 0; mask < (1 << d.n()); ++mask) {
    bool ok = true;
    for (int u = 0; u < d.n() && ok; ++u)
      for (int v = u + 1; v < d.n() && ok; ++v)
        if ((mask >> u & 1) && (mask >> v & 1) && d.adjacent(u, v)) ok = false;
    if (ok) best = std::max(best, __builtin_popcount(mask));
  }
  return best;
}

}  // namespace

TEST_CASE("arcs are simple and neighbourhoods exact") {
  Digraph d(4);
  d.add_arc(0, 1);
  d.add_arc(0, 1);
  d.add_arc(2, 0);
  CHECK(d.arc_count() == 2);
  CHECK(d.has_arc(0, 1));
  CHECK_FALSE(d.has_arc(1, 0));
  CHECK(d.adjacent(1, 0));
  CHECK(bits_to_vector(d.out(0)) == std::vector<int>{1});
  CHECK(bits_to_vector(d.in(0)) == std::vector<int>{2});
  d.remove_arc(0, 1);
  CHECK(d.arc_count() == 1);
  CHECK(d.arcs() == std::vector<std::pair<int, int>>{{2, 0}});
}

TEST_CASE("induced subgraph relabels in the given order") {
  auto d = from_arcs(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
  auto s = d.induced({3, 0, 1});
  CHECK(s.n() == 3);
  CHECK(s.has_arc(0, 1));  // 3 -> 0
  CHECK(s.has_arc(1, 2));  // 0 -> 1
  CHECK(s.arc_count() == 2);
}

TEST_CASE("is_tournament") {
  CHECK(is_tournament(Digraph(1)));
  CHECK_FALSE(is_tournament(from_arcs(2, {{0, 1}, {1, 0}})));
  auto t2 = counterexample(2, 1, 1);
  CHECK(t2.n() == 12);
  CHECK(is_tournament(t2.graph));
}

TEST_CASE("is_semicomplete") {
  CHECK(is_semicomplete(random_tournament(7, 3)));
  CHECK_FALSE(is_semicomplete(from_arcs(3, {{0, 1}, {1, 2}})));
  auto t = random_tournament(6, 11);
  auto [u, v] = t.arcs().front();
  t.add_arc(v, u);
  CHECK(is_semicomplete(t));
  CHECK_FALSE(is_tournament(t));
}

TEST_CASE("h_semicompleteness") {
  CHECK(h_semicompleteness(random_tournament(8, 5)) == 0);
  auto d = from_arcs(4, {{0, 3}, {1, 2}, {2, 3}, {3, 1}});
  CHECK(h_semicompleteness(d) == 2);
  CHECK(h_semicompleteness(Digraph(5)) == 4);
}

TEST_CASE("clique_cover_number") {
  auto [h1, p1] = clique_cover_number(random_tournament(9, 2));
  CHECK(h1 == 1);
  CHECK(p1.parts.size() == 1);
  auto [h3, p3] = clique_cover_number(Digraph(3));
  CHECK(h3 == 3);
  CHECK(verify_clique_partition(Digraph(3), p3).empty());
  try {
    clique_cover_number(Digraph(kExactCap + 1));
    FAIL("expected CapExceeded");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::CapExceeded);
  }
}

TEST_CASE("independence_number") {
  CHECK(independence_number(random_tournament(6, 9)) == 1);
  CHECK(independence_number(Digraph(4)) == 4);
  auto d = from_arcs(4, {{0, 1}, {2, 3}});
  CHECK(independence_number(d) == brute_independence(d));
  CHECK(independence_number(d) == 2);
  CHECK_THROWS_AS(independence_number(Digraph(kExactCap + 1)), Error);
}

TEST_CASE("verify_clique_partition rejects bad partitions") {
  auto d = from_arcs(3, {{0, 1}, {1, 2}});
  CHECK(verify_clique_partition(d, {{{0, 1}, {2}}}).empty());
  CHECK_FALSE(verify_clique_partition(d, {{{0, 2}, {1}}}).empty());  // 0 and 2 not adjacent
  CHECK_FALSE(verify_clique_partition(d, {{{0, 1}}}).empty());       // 2 uncovered
  CHECK_FALSE(verify_clique_partition(d, {{{0, 1}, {1, 2}}}).empty());  // overlap
}

TEST_CASE("class containment chain on random digraphs") {
  SplitMix64 rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(12));
    Digraph d(n);
    const double p = rng.unit();
    for (int u = 0; u < n; ++u)
      for (int v = 0; v < n; ++v)
        if (u != v && rng.chance(p)) d.add_arc(u, v);
    const int h = h_semicompleteness(d);
    const int cover = clique_cover_number(d).first;
    const int alpha = independence_number(d);
    if (is_tournament(d)) CHECK(is_semicomplete(d));
    if (is_semicomplete(d)) CHECK(h == 0);
    CHECK(cover <= h + 1);
    CHECK(h + 1 <= n);
    CHECK(alpha <= cover);
    CHECK(alpha == brute_independence(d));
    CHECK(verify_clique_partition(d, clique_cover_number(d).second).empty());
  }
}

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ddp/digraph.hpp"
#include "ddp/instance.hpp"

namespace ddp {

/// Three ordered vertex lists of equal length k. A and C are stored in
/// matched order, so the matching arc of index i is C[i] -> A[i].
struct KTriple {
  std::vector<int> A, B, C;

  int k() const { return static_cast<int>(B.size()); }
  /// Mat(C[i]) = A[i]; InvalidArgument when u is not in C.
  int mat(int u) const;
  /// Mat^{-1}(A[i]) = C[i]; InvalidArgument when a is not in A.
  int mat_inverse(int a) const;
  bool operator==(const KTriple&) const = default;
};

struct TripleVerdict {
  bool ok = true;
  std::string condition;  ///< "size", "range", "disjoint" or "arc"
  int arc_tail = -1, arc_head = -1;
  int vertex = -1;
  std::string message;
};

TripleVerdict validate_triple(const Digraph& d, const KTriple& t);

constexpr int kTripleExactVertices = 16;
constexpr int kTripleExactSize = 4;

struct TripleSearch {
  int jobs = 1;
  bool exact = true;  ///< set by find_triple: false when the heuristic ran
  std::uint64_t b_sets = 0;  ///< candidate B-sets examined
};

/// A k-triple of d, or nothing. Exhaustive over B-sets (in lexicographic
/// order, lowest rank wins) when n <= 16 and k <= 4; greedy above that,
/// where a miss proves nothing. Output always validates.
std::optional<KTriple> find_triple(const Digraph& d, int k, TripleSearch* search = nullptr);

/// Semicomplete digraph on 3k + padding vertices holding the returned triple
/// under shuffled labels. Pairs outside the forced arcs are oriented at
/// random, with a digon one time in ten.
std::pair<Digraph, KTriple> plant_triple(int k, int padding, std::uint64_t seed);

/// Requests drawn among the vertices outside the triple (at least two are
/// needed), at congestion c.
Instance planted_triple_instance(int k, int padding, int requests, int c, std::uint64_t seed,
                                 KTriple* triple = nullptr);

KTriple read_triple(const std::string& text, int n);
std::string write_triple(const KTriple& t);

}  // namespace ddp

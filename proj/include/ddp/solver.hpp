#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ddp/instance.hpp"

namespace ddp {

enum class Objective { Any, MinTotalLength, EnumerateAll };

struct SolveMode {
  Objective objective = Objective::Any;
  std::uint64_t node_limit = 0;  ///< search nodes; 0 means unlimited
  double time_limit_s = 0.0;     ///< wall clock; 0 means unlimited
  std::size_t max_solutions = 200000;  ///< enumeration cap (CapExceeded)
};

struct SolveStats {
  std::uint64_t nodes = 0;
  std::uint64_t memo_hits = 0;
};

/// Any-mode: a solution iff one exists. Min-mode: a solution of minimum total
/// vertex count. Throws BudgetExceeded when a limit in `mode` is hit.
std::optional<RoutedSolution> solve(const Instance& inst, const SolveMode& mode = {}, SolveStats* stats = nullptr);

/// Every solution up to permutation of paths among identical requests; within
/// a group of identical requests paths appear in lexicographically
/// non-decreasing order. Throws CapExceeded past mode.max_solutions.
std::vector<RoutedSolution> enumerate_solutions(const Instance& inst, const SolveMode& mode = {});

/// Simple s-t paths with congestion and restriction ignored; for small tests.
std::vector<std::vector<int>> all_simple_paths(const Digraph& d, int s, int t, const Bits& forbidden);

struct Shortcut {
  int path = -1;
  int from = 0;  ///< position in the path where the replaced subpath starts
  int to = 0;    ///< position where it ends
  std::vector<int> walk;  ///< replacement, from path[from] to path[to]
};

/// A replacement walk for a subpath of path i with strictly fewer vertices,
/// at most `max_len` vertices, using only vertices that are i-free (and, for
/// restricted instances, no foreign terminal). Largest saving wins; ties go to
/// the earliest start, then the latest end.
std::optional<Shortcut> find_shortcut(const Instance& inst, const RoutedSolution& sol, int i,
                                      bool check_congestion = true, int max_len = 8);
/// True when no path of `sol` admits a shortcut.
bool is_minimal(const Instance& inst, const RoutedSolution& sol);
/// Removes cycles from a walk, keeping the first occurrence of each vertex.
std::vector<int> loop_erase(const std::vector<int>& walk);
std::vector<int> apply_shortcut(const std::vector<int>& path, const Shortcut& sc);

/// True iff inst is solvable and inst minus v is not. TerminalVertex for terminals.
bool is_relevant(const Instance& inst, int v, const SolveMode& mode = {});

}  // namespace ddp

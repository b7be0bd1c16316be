#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ddp/digraph.hpp"
#include "ddp/instance.hpp"

namespace ddp {

/// Bags X_1..X_p. Valid when the bags cover V, every arc (u,v) has u in a
/// bag at or after some bag holding v, and each vertex occupies an interval.
struct DirectedPathDecomposition {
  std::vector<std::vector<int>> bags;
  bool operator==(const DirectedPathDecomposition&) const = default;
};

struct DecompositionVerdict {
  bool ok = true;
  std::string condition;  ///< "range", "cover", "arc" or "contiguity"
  int vertex = -1;
  int arc_tail = -1, arc_head = -1;
  std::string message;
};

DecompositionVerdict validate_decomposition(const Digraph& d, const DirectedPathDecomposition& dec);
int width(const DirectedPathDecomposition& dec);

/// Bags of a vertex layout: bag i holds v_i plus every earlier vertex that
/// still has an out-neighbour at position >= i.
DirectedPathDecomposition layout_to_decomposition(const Digraph& d, const std::vector<int>& order);
/// Largest number of prefix vertices with an out-neighbour outside the prefix.
int layout_width(const Digraph& d, const std::vector<int>& order);

constexpr int kDpwCap = 18;
/// Minimum width with a validated witness; CapExceeded above `cap` vertices.
std::pair<int, DirectedPathDecomposition> exact_dpw(const Digraph& d, int cap = kDpwCap);

struct DpOptions {
  std::size_t state_limit = 4000000;  ///< per layer; CapExceeded beyond it
};

/// Exact DDP over the vertex order given by first appearance in `dec`.
/// InvalidDecomposition when dec does not validate for inst.graph.
std::optional<RoutedSolution> dp_solve(const Instance& inst, const DirectedPathDecomposition& dec,
                                       const DpOptions& opt = {});

DirectedPathDecomposition read_decomposition(const std::string& text, int n);
std::string write_decomposition(const DirectedPathDecomposition& dec);

}  // namespace ddp

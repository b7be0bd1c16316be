#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ddp/digraph.hpp"

namespace ddp {

struct Request {
  int s = 0;
  int t = 0;
  int multiplicity = 1;
  bool operator==(const Request&) const = default;
};

/// A (k,c)-DDP instance. `names` is optional (empty or one label per vertex).
struct Instance {
  Digraph graph;
  std::vector<Request> requests;
  int congestion = 1;
  bool restricted = false;
  std::vector<std::string> names;

  int n() const { return graph.n(); }
  int k() const;
  /// One (s,t) pair per unit request, in request order.
  std::vector<std::pair<int, int>> expanded() const;
  Bits terminals() const;
  bool operator==(const Instance& o) const {
    return graph == o.graph && requests == o.requests && congestion == o.congestion &&
           restricted == o.restricted && names == o.names;
  }
};

struct RoutedSolution {
  std::vector<std::vector<int>> paths;
  std::vector<int> occupancy;

  static RoutedSolution from_paths(int n, std::vector<std::vector<int>> paths);
  std::size_t total_length() const;
  bool operator==(const RoutedSolution&) const = default;
};

struct Violation {
  int path = -1;
  int vertex = -1;
  std::string what;
};

/// Checks every solution invariant; empty result means ok.
/// Throws ArityMismatch when the path count differs from k.
std::vector<Violation> verify_solution(const Instance& inst, const RoutedSolution& sol);
std::string describe(const std::vector<Violation>& v);

/// Vertex indices of the counterexample family: copy t, u_i and v_i (1-based i).
struct CounterexampleLayout {
  int n = 0;
  int copies = 1;
  int u(int copy, int i) const { return copy * 4 * (n + 1) + (i - 1); }
  int v(int copy, int i) const { return copy * 4 * (n + 1) + 2 * n + 2 + (i - 1); }
};

Instance counterexample(int n, int c, int tau);
Instance counterexample_asymmetric(int n);

Digraph random_tournament(int n, std::uint64_t seed);
Digraph random_semicomplete(int n, double digon_rate, std::uint64_t seed);
/// Semicomplete digraph plus `k` uniformly drawn requests (s != t) at congestion c.
Instance random_instance(int n, double digon_rate, int k, int c, std::uint64_t seed);

/// Copy of `inst` with vertex v removed and the rest relabelled in order.
/// Requests touching v are dropped; `old_index` maps new to old indices.
Instance delete_vertex(const Instance& inst, int v, std::vector<int>* old_index = nullptr);

Instance read_instance(const std::string& text);
std::string write_instance(const Instance& inst);
RoutedSolution read_solution(const std::string& text, int n);
std::string write_solution(const RoutedSolution& sol);

/// Line-oriented reader shared by the text formats: strips '#' comments and
/// blank lines, and keeps 1-based line numbers for error messages.
struct TextLines {
  explicit TextLines(const std::string& text);
  std::vector<std::pair<int, std::string>> lines;
  std::vector<std::pair<int, std::string>> comments;
};
std::vector<long long> parse_ints(const std::string& line, int lineno);

}  // namespace ddp

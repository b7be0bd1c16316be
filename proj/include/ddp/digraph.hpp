#pragma once

#include <boost/dynamic_bitset.hpp>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace ddp {

using Bits = boost::dynamic_bitset<std::uint64_t>;

/// Iterate the set bits of `b` in increasing order.
template <class F>
void for_each_bit(const Bits& b, F&& f) {
  for (auto i = b.find_first(); i != Bits::npos; i = b.find_next(i)) f(static_cast<int>(i));
}

std::vector<int> bits_to_vector(const Bits& b);

/// Simple digraph on vertices 0..n-1 with out- and in-neighbourhood bitmasks.
/// No loops; adding an existing arc is a no-op.
class Digraph {
 public:
  Digraph() = default;
  explicit Digraph(int n);

  int n() const { return n_; }
  void add_arc(int u, int v);
  void remove_arc(int u, int v);
  bool has_arc(int u, int v) const { return out_[u].test(v); }
  bool adjacent(int u, int v) const { return out_[u].test(v) || in_[u].test(v); }
  const Bits& out(int u) const { return out_[u]; }
  const Bits& in(int v) const { return in_[v]; }
  Bits empty_set() const { return Bits(n_); }
  Bits full_set() const;
  std::size_t arc_count() const;
  /// Arcs in lexicographic (u, v) order.
  std::vector<std::pair<int, int>> arcs() const;
  /// Subgraph induced by `keep`, relabelled 0..|keep|-1 in the given order.
  Digraph induced(const std::vector<int>& keep) const;

  bool operator==(const Digraph& o) const { return n_ == o.n_ && out_ == o.out_; }

 private:
  int n_ = 0;
  std::vector<Bits> out_, in_;
};

/// Parts must be pairwise disjoint, cover V, and each part must be a clique.
struct CliquePartition {
  std::vector<std::vector<int>> parts;
};

bool is_tournament(const Digraph& d);
bool is_semicomplete(const Digraph& d);
int h_semicompleteness(const Digraph& d);
/// Empty string when valid, otherwise the first problem found.
std::string verify_clique_partition(const Digraph& d, const CliquePartition& p);

constexpr int kExactCap = 20;
/// Minimum clique cover with witness; CapExceeded above `cap` vertices.
std::pair<int, CliquePartition> clique_cover_number(const Digraph& d, int cap = kExactCap);
int independence_number(const Digraph& d, int cap = kExactCap);

}  // namespace ddp

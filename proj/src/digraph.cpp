#include "ddp/digraph.hpp"

#include <algorithm>
#include <bit>
#include <functional>

#include "ddp/errors.hpp"

namespace ddp {

std::vector<int> bits_to_vector(const Bits& b) {
  std::vector<int> v;
  for_each_bit(b, [&](int x) { v.push_back(x); });
  return v;
}

Digraph::Digraph(int n) : n_(n), out_(n, Bits(n)), in_(n, Bits(n)) {
  if (n < 0) throw Error(Errc::InvalidArgument, "negative vertex count");
}

void Digraph::add_arc(int u, int v) {
  if (u < 0 || v < 0 || u >= n_ || v >= n_) throw Error(Errc::InvalidArgument, "arc endpoint out of range");
  if (u == v) throw Error(Errc::InvalidArgument, "loop at vertex " + std::to_string(u));
  out_[u].set(v);
  in_[v].set(u);
}

void Digraph::remove_arc(int u, int v) {
  out_[u].reset(v);
  in_[v].reset(u);
}

Bits Digraph::full_set() const {
  Bits b(n_);
  b.set();
  return b;
}

std::size_t Digraph::arc_count() const {
  std::size_t m = 0;
  for (const auto& b : out_) m += b.count();
  return m;
}

std::vector<std::pair<int, int>> Digraph::arcs() const {
  std::vector<std::pair<int, int>> a;
  for (int u = 0; u < n_; ++u) for_each_bit(out_[u], [&](int v) { a.emplace_back(u, v); });
  return a;
}

Digraph Digraph::induced(const std::vector<int>& keep) const {
  std::vector<int> pos(n_, -1);
  for (std::size_t i = 0; i < keep.size(); ++i) pos[keep[i]] = static_cast<int>(i);
  Digraph d(static_cast<int>(keep.size()));
  for (std::size_t i = 0; i < keep.size(); ++i)
    for_each_bit(out_[keep[i]], [&](int v) {
      if (pos[v] >= 0) d.add_arc(static_cast<int>(i), pos[v]);
    });
  return d;
}

bool is_tournament(const Digraph& d) {
  for (int u = 0; u < d.n(); ++u)
    for (int v = u + 1; v < d.n(); ++v)
      if (d.has_arc(u, v) == d.has_arc(v, u)) return false;
  return true;
}

bool is_semicomplete(const Digraph& d) { return h_semicompleteness(d) == 0; }

int h_semicompleteness(const Digraph& d) {
  int worst = 0;
  for (int u = 0; u < d.n(); ++u) {
    Bits nb = d.out(u) | d.in(u);
    worst = std::max(worst, d.n() - 1 - static_cast<int>(nb.count()));
  }
  return worst;
}

std::string verify_clique_partition(const Digraph& d, const CliquePartition& p) {
  std::vector<int> seen(d.n(), 0);
  for (const auto& part : p.parts) {
    for (int v : part) {
      if (v < 0 || v >= d.n()) return "vertex " + std::to_string(v) + " out of range";
      if (seen[v]++) return "vertex " + std::to_string(v) + " in two parts";
    }
    for (std::size_t i = 0; i < part.size(); ++i)
      for (std::size_t j = i + 1; j < part.size(); ++j)
        if (!d.adjacent(part[i], part[j]))
          return "non-adjacent pair " + std::to_string(part[i]) + "," + std::to_string(part[j]);
  }
  for (int v = 0; v < d.n(); ++v)
    if (!seen[v]) return "vertex " + std::to_string(v) + " uncovered";
  return {};
}

namespace {

std::vector<std::uint32_t> adjacency_masks(const Digraph& d) {
  std::vector<std::uint32_t> adj(d.n(), 0);
  for (int u = 0; u < d.n(); ++u)
    for (int v = 0; v < d.n(); ++v)
      if (u != v && d.adjacent(u, v)) adj[u] |= 1u << v;
  return adj;
}

void check_cap(const Digraph& d, int cap) {
  if (d.n() > cap) throw Error(Errc::CapExceeded, "n=" + std::to_string(d.n()) + " above exact cap " + std::to_string(cap));
}

}  // namespace

std::pair<int, CliquePartition> clique_cover_number(const Digraph& d, int cap) {
  check_cap(d, cap);
  const int n = d.n();
  if (n == 0) return {0, {}};
  auto adj = adjacency_masks(d);
  // Branch over vertices in increasing-degree order, placing each in an
  // existing compatible part or a new one.
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return std::popcount(adj[a]) < std::popcount(adj[b]); });
  std::vector<std::uint32_t> parts, best_parts;
  int best = n + 1;
  std::function<void(int)> rec = [&](int idx) {
    if (static_cast<int>(parts.size()) >= best) return;
    if (idx == n) {
      best = static_cast<int>(parts.size());
      best_parts = parts;
      return;
    }
    const int v = order[idx];
    // Index loop: the recursion may grow `parts` and move its storage.
    for (std::size_t j = 0; j < parts.size(); ++j) {
      if ((parts[j] & adj[v]) == parts[j]) {
        parts[j] |= 1u << v;
        rec(idx + 1);
        parts[j] &= ~(1u << v);
      }
    }
    parts.push_back(1u << v);
    rec(idx + 1);
    parts.pop_back();
  };
  rec(0);
  CliquePartition cp;
  for (auto m : best_parts) {
    std::vector<int> part;
    for (int v = 0; v < n; ++v)
      if (m >> v & 1u) part.push_back(v);
    cp.parts.push_back(part);
  }
  std::sort(cp.parts.begin(), cp.parts.end());
  return {best, cp};
}

int independence_number(const Digraph& d, int cap) {
  check_cap(d, cap);
  auto adj = adjacency_masks(d);
  std::function<int(std::uint32_t)> rec = [&](std::uint32_t cand) -> int {
    if (!cand) return 0;
    const int v = std::countr_zero(cand);
    // Either v is excluded, or v is taken and its neighbours dropped.
    int with = 1 + rec(cand & ~adj[v] & ~(1u << v));
    if (!(cand & adj[v])) return with;
    return std::max(with, rec(cand & ~(1u << v)));
  };
  const std::uint32_t all = d.n() == 32 ? ~0u : ((1u << d.n()) - 1);
  return rec(all);
}

}  // namespace ddp

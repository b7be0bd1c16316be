#include "ddp/pathwidth.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <sstream>

#include "ddp/errors.hpp"

namespace ddp {

DecompositionVerdict validate_decomposition(const Digraph& d, const DirectedPathDecomposition& dec) {
  const int n = d.n();
  const int p = static_cast<int>(dec.bags.size());
  std::vector<int> first(n, -1), last(n, -1), count(n, 0);
  DecompositionVerdict v;
  for (int i = 0; i < p; ++i)
    for (int x : dec.bags[i]) {
      if (x < 0 || x >= n) {
        v.ok = false;
        v.condition = "range";
        v.vertex = x;
        v.message = "bag " + std::to_string(i) + " holds out-of-range vertex " + std::to_string(x);
        return v;
      }
      if (first[x] < 0) first[x] = i;
      if (last[x] != i) ++count[x];
      last[x] = i;
    }
  for (int x = 0; x < n; ++x)
    if (first[x] < 0) {
      v.ok = false;
      v.condition = "cover";
      v.vertex = x;
      v.message = "vertex " + std::to_string(x) + " is in no bag";
      return v;
    }
  for (auto [a, b] : d.arcs())
    if (last[a] < first[b]) {
      v.ok = false;
      v.condition = "arc";
      v.arc_tail = a;
      v.arc_head = b;
      v.message = "arc " + std::to_string(a) + "->" + std::to_string(b) + " points forward";
      return v;
    }
  for (int x = 0; x < n; ++x)
    if (count[x] != last[x] - first[x] + 1) {
      v.ok = false;
      v.condition = "contiguity";
      v.vertex = x;
      v.message = "bags of vertex " + std::to_string(x) + " are not contiguous";
      return v;
    }
  return v;
}

int width(const DirectedPathDecomposition& dec) {
  std::size_t m = 0;
  for (const auto& b : dec.bags) m = std::max(m, b.size());
  return m == 0 ? 0 : static_cast<int>(m) - 1;
}

DirectedPathDecomposition layout_to_decomposition(const Digraph& d, const std::vector<int>& order) {
  const int n = d.n();
  std::vector<int> pos(n, -1);
  for (int i = 0; i < static_cast<int>(order.size()); ++i) pos[order[i]] = i;
  std::vector<int> until(n, 0);
  for (int u : order) {
    until[u] = pos[u];
    for_each_bit(d.out(u), [&](int w) { until[u] = std::max(until[u], pos[w]); });
  }
  DirectedPathDecomposition dec;
  for (int i = 0; i < static_cast<int>(order.size()); ++i) {
    std::vector<int> bag;
    for (int j = 0; j < i; ++j)
      if (until[order[j]] >= i) bag.push_back(order[j]);
    bag.push_back(order[i]);
    std::sort(bag.begin(), bag.end());
    dec.bags.push_back(bag);
  }
  return dec;
}

int layout_width(const Digraph& d, const std::vector<int>& order) {
  Bits prefix(d.n());
  int best = 0;
  for (int v : order) {
    prefix.set(v);
    int b = 0;
    for_each_bit(prefix, [&](int u) {
      if ((d.out(u) & ~prefix).any()) ++b;
    });
    best = std::max(best, b);
  }
  return best;
}

std::pair<int, DirectedPathDecomposition> exact_dpw(const Digraph& d, int cap) {
  const int n = d.n();
  if (n > cap) throw Error(Errc::CapExceeded, "n=" + std::to_string(n) + " above dpw cap " + std::to_string(cap));
  if (n == 0) return {0, {}};
  std::vector<std::uint32_t> out(n, 0);
  for (int u = 0; u < n; ++u) for_each_bit(d.out(u), [&](int w) { out[u] |= 1u << w; });
  const std::uint32_t full = (n == 32) ? ~0u : ((1u << n) - 1);
  // best[S]: least possible maximum boundary over layouts whose prefixes
  // build S, counting every prefix up to S itself.
  std::vector<std::uint8_t> best(static_cast<std::size_t>(full) + 1, 0);
  for (std::uint32_t S = 1; S <= full; ++S) {
    int boundary = 0;
    for (std::uint32_t r = S; r; r &= r - 1) {
      int u = std::countr_zero(r);
      if (out[u] & ~S) ++boundary;
    }
    int m = 255;
    for (std::uint32_t r = S; r; r &= r - 1) {
      int u = std::countr_zero(r);
      m = std::min<int>(m, best[S & ~(1u << u)]);
    }
    best[S] = static_cast<std::uint8_t>(std::max(boundary, m));
    if (S == full) break;
  }
  std::vector<int> order(n);
  std::uint32_t S = full;
  for (int i = n - 1; i >= 0; --i) {
    int pick = -1;
    for (std::uint32_t r = S; r; r &= r - 1) {
      int u = std::countr_zero(r);
      if (best[S & ~(1u << u)] <= best[full]) {
        pick = u;
        break;
      }
    }
    order[i] = pick;
    S &= ~(1u << pick);
  }
  auto dec = layout_to_decomposition(d, order);
  auto verdict = validate_decomposition(d, dec);
  if (!verdict.ok) throw Error(Errc::InvalidDecomposition, "internal layout failed validation: " + verdict.message);
  if (width(dec) != best[full])
    throw Error(Errc::InvalidDecomposition, "internal layout width disagrees with search value");
  return {best[full], dec};
}

DirectedPathDecomposition read_decomposition(const std::string& text, int n) {
  // Blank lines carry no bag; bags are written non-empty.
  TextLines tl(text);
  if (tl.lines.empty() || tl.lines[0].second != "dpd 1")
    throw Error(Errc::ParseError, "line " + std::to_string(tl.lines.empty() ? 1 : tl.lines[0].first) + ": expected 'dpd 1'");
  DirectedPathDecomposition dec;
  for (std::size_t i = 1; i < tl.lines.size(); ++i) {
    auto xs = parse_ints(tl.lines[i].second, tl.lines[i].first);
    std::vector<int> bag;
    for (auto x : xs) {
      if (x < 0 || x >= n) throw Error(Errc::ParseError, "line " + std::to_string(tl.lines[i].first) + ": vertex out of range");
      bag.push_back(static_cast<int>(x));
    }
    dec.bags.push_back(bag);
  }
  return dec;
}

std::string write_decomposition(const DirectedPathDecomposition& dec) {
  std::ostringstream os;
  os << "dpd 1\n";
  for (const auto& b : dec.bags) {
    for (std::size_t i = 0; i < b.size(); ++i) os << (i ? " " : "") << b[i];
    os << "\n";
  }
  return os.str();
}

}  // namespace ddp

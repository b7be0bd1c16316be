#include <map>

#include "ddp/errors.hpp"
#include "ddp/reductions.hpp"

namespace ddp {

Instance congestion_blowup(const Instance& inst) {
  if (inst.restricted) throw Error(Errc::RestrictedUnsupported, "blowup is defined for unrestricted instances");
  const int n = inst.n(), c = inst.congestion;
  auto copy = [c](int v, int r) { return v * c + r; };
  Instance out;
  out.graph = Digraph(n * c);
  for (auto [u, w] : inst.graph.arcs())
    for (int r = 0; r < c; ++r)
      for (int s = 0; s < c; ++s) out.graph.add_arc(copy(u, r), copy(w, s));
  for (int v = 0; v < n; ++v)
    for (int r = 0; r < c; ++r)
      for (int s = r + 1; s < c; ++s) out.graph.add_arc(copy(v, r), copy(v, s));
  if (!inst.names.empty()) {
    out.names.resize(n * c);
    for (int v = 0; v < n; ++v)
      for (int r = 0; r < c; ++r)
        out.names[copy(v, r)] = c == 1 ? inst.names[v] : inst.names[v] + "#" + std::to_string(r + 1);
  }
  // The j-th terminal occurrence of v (over sources and targets, in request
  // order) takes copy j mod c; more than c occurrences stay infeasible.
  std::vector<int> used(n, 0);
  std::map<std::pair<int, int>, int> merged;
  std::vector<std::pair<int, int>> order;
  for (auto [s, t] : inst.expanded()) {
    const int cs = copy(s, used[s]++ % c), ct = copy(t, used[t]++ % c);
    auto key = std::make_pair(cs, ct);
    if (merged.find(key) == merged.end()) order.push_back(key);
    ++merged[key];
  }
  for (auto key : order) out.requests.push_back({key.first, key.second, merged[key]});
  out.congestion = 1;
  return out;
}

}  // namespace ddp

#include "ddp/solver.hpp"

#include <algorithm>
#include <chrono>
#include <climits>
#include <functional>
#include <map>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "ddp/errors.hpp"

namespace ddp {

namespace {

constexpr int kInf = INT_MAX / 4;

struct Group {
  int s, t;
  std::vector<int> members;  // expanded request indices
};

using Assignment = std::vector<std::pair<int, std::vector<int>>>;  // (group, path)

class Engine {
 public:
  Engine(const Instance& inst, const SolveMode& mode, SolveStats* stats)
      : inst_(inst), g_(inst.graph), n_(inst.n()), c_(inst.congestion), mode_(mode), stats_(stats) {
    start_ = std::chrono::steady_clock::now();
    term_ = inst.terminals();
    const auto req = inst.expanded();
    std::map<std::pair<int, int>, int> idx;
    for (int i = 0; i < static_cast<int>(req.size()); ++i) {
      auto [it, fresh] = idx.emplace(req[i], static_cast<int>(groups_.size()));
      if (fresh) groups_.push_back({req[i].first, req[i].second, {}});
      groups_[it->second].members.push_back(i);
    }
    occ_.assign(n_, 0);
    res_.assign(n_, 0);
    routed_.assign(groups_.size(), 0);
    for (const auto& gr : groups_) {
      res_[gr.s] += static_cast<int>(gr.members.size());
      res_[gr.t] += static_cast<int>(gr.members.size());
    }
  }

  std::optional<RoutedSolution> run() {
    for (int v = 0; v < n_; ++v)
      if (res_[v] > c_) return std::nullopt;
    Assignment fixed;
    if (mode_.objective != Objective::EnumerateAll) {
      // A request whose endpoints are joined by an arc is routed directly:
      // any solution can be rewritten to use that arc without cost.
      for (int gi = 0; gi < static_cast<int>(groups_.size()); ++gi) {
        const auto& gr = groups_[gi];
        if (!g_.has_arc(gr.s, gr.t)) continue;
        while (routed_[gi] < static_cast<int>(gr.members.size())) {
          std::vector<int> p{gr.s, gr.t};
          apply(gi, p, +1);
          fixed.emplace_back(gi, p);
        }
      }
    }
    Assignment found;
    if (mode_.objective == Objective::MinTotalLength) {
      if (search_min(kInf, found) >= kInf) return std::nullopt;
    } else {
      if (!search_any()) return std::nullopt;
      found = stack_;
    }
    fixed.insert(fixed.end(), found.begin(), found.end());
    return assemble(fixed);
  }

  std::vector<RoutedSolution> enumerate() {
    std::vector<RoutedSolution> out;
    for (int v = 0; v < n_; ++v)
      if (res_[v] > c_) return out;
    Assignment cur;
    std::function<void(int, int)> rec = [&](int gi, int copy) {
      tick();
      if (gi == static_cast<int>(groups_.size())) {
        if (out.size() >= mode_.max_solutions)
          throw Error(Errc::CapExceeded, "more than " + std::to_string(mode_.max_solutions) + " solutions");
        out.push_back(assemble(cur));
        return;
      }
      const auto& gr = groups_[gi];
      if (copy == static_cast<int>(gr.members.size())) return rec(gi + 1, 0);
      const std::vector<int>* prev = copy > 0 ? &cur.back().second : nullptr;
      std::vector<std::vector<int>> cands;
      paths_for(gi, false, [&](const std::vector<int>& p) {
        if (!prev || !(p < *prev)) cands.push_back(p);
        return false;
      });
      std::sort(cands.begin(), cands.end());
      for (const auto& p : cands) {
        apply(gi, p, +1);
        cur.emplace_back(gi, p);
        rec(gi, copy + 1);
        cur.pop_back();
        apply(gi, p, -1);
      }
    };
    rec(0, 0);
    return out;
  }

 private:
  const Instance& inst_;
  const Digraph& g_;
  int n_, c_;
  SolveMode mode_;
  SolveStats* stats_;
  std::chrono::steady_clock::time_point start_;
  Bits term_;
  std::vector<Group> groups_;
  std::vector<int> occ_, res_, routed_;
  Assignment stack_;
  std::unordered_set<std::string> fail_;
  std::unordered_map<std::string, int> lower_;
  std::unordered_map<std::string, std::pair<int, Assignment>> exact_;
  std::uint64_t nodes_ = 0;

  void tick() {
    ++nodes_;
    if (stats_) stats_->nodes = nodes_;
    if (mode_.node_limit && nodes_ > mode_.node_limit)
      throw Error(Errc::BudgetExceeded, "node limit " + std::to_string(mode_.node_limit) + " reached");
    if (mode_.time_limit_s > 0 && (nodes_ & 255) == 0) {
      std::chrono::duration<double> el = std::chrono::steady_clock::now() - start_;
      if (el.count() > mode_.time_limit_s)
        throw Error(Errc::BudgetExceeded, "time limit " + std::to_string(mode_.time_limit_s) + "s reached");
    }
  }

  void apply(int gi, const std::vector<int>& p, int sign) {
    for (int v : p) occ_[v] += sign;
    res_[groups_[gi].s] -= sign;
    res_[groups_[gi].t] -= sign;
    routed_[gi] += sign;
  }

  RoutedSolution assemble(const Assignment& a) const {
    std::vector<std::vector<int>> paths(inst_.k());
    std::vector<int> next(groups_.size(), 0);
    // Paths of one group go to its members in the order they were chosen,
    // after sorting so that output is canonical.
    std::vector<std::vector<std::vector<int>>> per(groups_.size());
    for (const auto& [gi, p] : a) per[gi].push_back(p);
    for (std::size_t gi = 0; gi < groups_.size(); ++gi) {
      std::sort(per[gi].begin(), per[gi].end(), [](const auto& x, const auto& y) {
        return x.size() != y.size() ? x.size() < y.size() : x < y;
      });
      for (const auto& p : per[gi]) paths[groups_[gi].members[next[gi]++]] = p;
    }
    return RoutedSolution::from_paths(n_, std::move(paths));
  }

  std::string key() const {
    std::string k;
    k.reserve(n_ + groups_.size());
    for (int v = 0; v < n_; ++v) k.push_back(static_cast<char>(occ_[v]));
    for (int r : routed_) k.push_back(static_cast<char>(r));
    return k;
  }

  Bits inner_usable(int gi) const {
    Bits u(n_);
    for (int v = 0; v < n_; ++v)
      if (occ_[v] + res_[v] < c_ && !(inst_.restricted && term_.test(v))) u.set(v);
    u.reset(groups_[gi].s);
    u.reset(groups_[gi].t);
    return u;
  }

  /// Arc distance from each usable vertex to t, through usable vertices.
  std::vector<int> dist_to(int t, const Bits& usable) const {
    std::vector<int> d(n_, kInf);
    std::vector<int> q{t};
    d[t] = 0;
    for (std::size_t h = 0; h < q.size(); ++h) {
      int x = q[h];
      Bits pre = g_.in(x) & usable;
      for_each_bit(pre, [&](int y) {
        if (d[y] == kInf) {
          d[y] = d[x] + 1;
          q.push_back(y);
        }
      });
    }
    return d;
  }

  /// Streams candidate paths for group gi in order of length, then
  /// lexicographically; only chordless paths when `chordless` is set. The
  /// callback returns true to stop. Returns true if stopped early.
  bool paths_for(int gi, bool chordless, const std::function<bool(const std::vector<int>&)>& cb) const {
    const int s = groups_[gi].s, t = groups_[gi].t;
    Bits usable = inner_usable(gi);
    auto d = dist_to(t, usable);
    int ds = kInf;
    if (g_.has_arc(s, t)) ds = 1;
    for_each_bit(g_.out(s) & usable, [&](int w) { ds = std::min(ds, d[w] + 1); });
    if (ds >= kInf) return false;
    const int max_len = static_cast<int>(usable.count()) + 2;
    std::vector<int> path{s};
    Bits on(n_);
    on.set(s);
    bool stop = false;
    std::function<void(int, const Bits&)> rec = [&](int L, const Bits& blocked) {
      if (stop) return;
      const int x = path.back();
      const int len = static_cast<int>(path.size());
      if (g_.has_arc(x, t) && !(chordless && blocked.test(t))) {
        if (len + 1 == L) {
          path.push_back(t);
          stop = cb(path);
          path.pop_back();
          if (stop) return;
        }
        if (chordless) return;
      }
      if (len + 1 >= L) return;
      Bits next = g_.out(x) & usable & ~on;
      if (chordless) next &= ~blocked;
      Bits nb = blocked | g_.out(x);
      for (auto w = next.find_first(); w != Bits::npos && !stop; w = next.find_next(w)) {
        const int wi = static_cast<int>(w);
        if (len + 1 + d[wi] > L) continue;
        path.push_back(wi);
        on.set(wi);
        rec(L, chordless ? nb : blocked);
        on.reset(wi);
        path.pop_back();
      }
    };
    for (int L = ds + 1; L <= max_len && !stop; ++L) rec(L, Bits(n_));
    return stop;
  }

  /// Number of chordless candidate paths for gi, capped. Counting needs no
  /// length order, so a single DFS replaces the sweep over lengths.
  int count_paths(int gi, int cap) const {
    const int s = groups_[gi].s, t = groups_[gi].t;
    if (g_.has_arc(s, t)) return 1;
    Bits usable = inner_usable(gi);
    auto d = dist_to(t, usable);
    int cnt = 0;
    Bits on(n_);
    std::function<void(int, const Bits&)> rec = [&](int x, const Bits& blocked) {
      if (g_.has_arc(x, t)) {
        if (!blocked.test(t)) ++cnt;
        return;
      }
      Bits next = g_.out(x) & usable;
      next -= on;
      next -= blocked;
      const Bits nb = blocked | g_.out(x);
      for (auto w = next.find_first(); w != Bits::npos && cnt < cap; w = next.find_next(w)) {
        if (d[w] >= kInf) continue;
        on.set(w);
        rec(static_cast<int>(w), nb);
        on.reset(w);
      }
    };
    on.set(s);
    rec(s, Bits(n_));
    return std::min(cnt, cap);
  }

  /// Picks the unrouted group with fewest candidates; -1 if all routed,
  /// -2 if some group has none.
  int choose() const {
    int best = -1, best_cnt = INT_MAX;
    for (int gi = 0; gi < static_cast<int>(groups_.size()); ++gi) {
      if (routed_[gi] == static_cast<int>(groups_[gi].members.size())) continue;
      int cnt = count_paths(gi, std::min(best_cnt, 64));
      if (cnt == 0) return -2;
      if (cnt < best_cnt) {
        best_cnt = cnt;
        best = gi;
      }
    }
    return best;
  }

  bool search_any() {
    tick();
    std::string k = key();
    if (fail_.count(k)) {
      if (stats_) ++stats_->memo_hits;
      return false;
    }
    int gi = choose();
    if (gi == -1) return true;
    if (gi >= 0) {
      bool ok = false;
      paths_for(gi, true, [&](const std::vector<int>& p) {
        apply(gi, p, +1);
        stack_.emplace_back(gi, p);
        if (search_any()) {
          ok = true;
          return true;
        }
        stack_.pop_back();
        apply(gi, p, -1);
        return false;
      });
      if (ok) return true;
    }
    fail_.insert(std::move(k));
    return false;
  }

  /// Lower bound on remaining cost: each unrouted copy needs at least its
  /// current shortest path. kInf when some group is disconnected.
  int remaining_bound() const {
    int lb = 0;
    for (int gi = 0; gi < static_cast<int>(groups_.size()); ++gi) {
      int left = static_cast<int>(groups_[gi].members.size()) - routed_[gi];
      if (!left) continue;
      const int s = groups_[gi].s, t = groups_[gi].t;
      Bits usable = inner_usable(gi);
      int ds = kInf;
      if (g_.has_arc(s, t)) ds = 1;
      else {
        auto d = dist_to(t, usable);
        for_each_bit(g_.out(s) & usable, [&](int w) { ds = std::min(ds, d[w] + 1); });
      }
      if (ds >= kInf) return kInf;
      lb += left * (ds + 1);
    }
    return lb;
  }

  /// Best remaining cost strictly below `ub`, or kInf. On success `out`
  /// holds the chosen paths from this state on.
  int search_min(int ub, Assignment& out) {
    tick();
    std::string k = key();
    if (auto it = exact_.find(k); it != exact_.end()) {
      if (stats_) ++stats_->memo_hits;
      if (it->second.first < ub) {
        out = it->second.second;
        return it->second.first;
      }
      return kInf;
    }
    if (auto it = lower_.find(k); it != lower_.end() && it->second >= ub) {
      if (stats_) ++stats_->memo_hits;
      return kInf;
    }
    int lb = remaining_bound();
    if (lb == 0) {
      out.clear();
      exact_[k] = {0, {}};
      return 0;
    }
    if (lb >= ub) {
      auto& slot = lower_[k];
      slot = std::max(slot, lb);
      return kInf;
    }
    int gi = choose();
    int best = ub;
    Assignment best_out;
    if (gi >= 0) {
      const int s = groups_[gi].s, t = groups_[gi].t;
      // Bound for the other copies: lb minus one shortest copy of gi.
      int own = 0;
      {
        Bits usable = inner_usable(gi);
        auto d = dist_to(t, usable);
        int ds = g_.has_arc(s, t) ? 1 : kInf;
        for_each_bit(g_.out(s) & usable, [&](int w) { ds = std::min(ds, d[w] + 1); });
        own = ds + 1;
      }
      const int rest = lb - own;
      paths_for(gi, true, [&](const std::vector<int>& p) {
        const int len = static_cast<int>(p.size());
        if (len + rest >= best) return true;
        apply(gi, p, +1);
        Assignment sub;
        int r = search_min(best - len, sub);
        apply(gi, p, -1);
        if (r < kInf && len + r < best) {
          best = len + r;
          best_out.clear();
          best_out.emplace_back(gi, p);
          best_out.insert(best_out.end(), sub.begin(), sub.end());
        }
        return false;
      });
    }
    if (best < ub) {
      exact_[k] = {best, best_out};
      out = std::move(best_out);
      return best;
    }
    auto& slot = lower_[k];
    slot = std::max(slot, ub);
    return kInf;
  }
};

}  // namespace

std::optional<RoutedSolution> solve(const Instance& inst, const SolveMode& mode, SolveStats* stats) {
  if (mode.objective == Objective::EnumerateAll)
    throw Error(Errc::InvalidArgument, "use enumerate_solutions for enumeration");
  Engine e(inst, mode, stats);
  return e.run();
}

std::vector<RoutedSolution> enumerate_solutions(const Instance& inst, const SolveMode& mode) {
  SolveMode m = mode;
  m.objective = Objective::EnumerateAll;
  Engine e(inst, m, nullptr);
  return e.enumerate();
}

std::vector<std::vector<int>> all_simple_paths(const Digraph& d, int s, int t, const Bits& forbidden) {
  std::vector<std::vector<int>> out;
  std::vector<int> path{s};
  std::vector<char> on(d.n(), 0);
  on[s] = 1;
  std::function<void()> rec = [&]() {
    int x = path.back();
    if (x == t) {
      out.push_back(path);
      return;
    }
    for_each_bit(d.out(x), [&](int w) {
      if (on[w] || (w != t && forbidden.test(w))) return;
      on[w] = 1;
      path.push_back(w);
      rec();
      path.pop_back();
      on[w] = 0;
    });
  };
  rec();
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> loop_erase(const std::vector<int>& walk) {
  std::vector<int> out;
  std::unordered_map<int, std::size_t> pos;
  for (int v : walk) {
    auto it = pos.find(v);
    if (it != pos.end()) {
      for (std::size_t j = it->second + 1; j < out.size(); ++j) pos.erase(out[j]);
      out.resize(it->second + 1);
    } else {
      pos[v] = out.size();
      out.push_back(v);
    }
  }
  return out;
}

std::vector<int> apply_shortcut(const std::vector<int>& path, const Shortcut& sc) {
  std::vector<int> w(path.begin(), path.begin() + sc.from);
  w.insert(w.end(), sc.walk.begin(), sc.walk.end());
  w.insert(w.end(), path.begin() + sc.to + 1, path.end());
  return loop_erase(w);
}

std::optional<Shortcut> find_shortcut(const Instance& inst, const RoutedSolution& sol, int i, bool check_congestion,
                                      int max_len) {
  const auto& P = sol.paths.at(i);
  const int n = inst.n();
  const Digraph& g = inst.graph;
  std::vector<int> occ(n, 0);
  for (const auto& p : sol.paths)
    for (int v : p) ++occ[v];
  Bits on(n);
  for (int v : P) on.set(v);
  const Bits term = inst.terminals();
  Bits allowed(n);
  for (int v = 0; v < n; ++v) {
    bool free = !check_congestion || on.test(v) || occ[v] <= inst.congestion - 1;
    bool foreign = inst.restricted && term.test(v) && v != P.front() && v != P.back();
    if (free && !foreign) allowed.set(v);
  }
  std::optional<Shortcut> best;
  int best_save = 0;
  const int m = static_cast<int>(P.size());
  for (int x = 0; x < m; ++x) {
    // BFS from P[x] through allowed vertices; parents give shortest walks.
    std::vector<int> dist(n, -1), par(n, -1);
    std::vector<int> q{P[x]};
    dist[P[x]] = 0;
    for (std::size_t h = 0; h < q.size(); ++h) {
      int u = q[h];
      if (dist[u] + 1 >= max_len) continue;
      for_each_bit(g.out(u) & allowed, [&](int w) {
        if (dist[w] < 0) {
          dist[w] = dist[u] + 1;
          par[w] = u;
          q.push_back(w);
        }
      });
    }
    for (int y = m - 1; y >= x + 2; --y) {
      if (dist[P[y]] < 0) continue;
      int verts = dist[P[y]] + 1;
      int save = (y - x + 1) - verts;
      if (save > best_save) {
        best_save = save;
        Shortcut sc;
        sc.path = i;
        sc.from = x;
        sc.to = y;
        for (int v = P[y]; v != -1; v = par[v]) sc.walk.push_back(v);
        std::reverse(sc.walk.begin(), sc.walk.end());
        best = sc;
      }
    }
  }
  return best;
}

bool is_minimal(const Instance& inst, const RoutedSolution& sol) {
  for (int i = 0; i < static_cast<int>(sol.paths.size()); ++i)
    if (find_shortcut(inst, sol, i)) return false;
  return true;
}

bool is_relevant(const Instance& inst, int v, const SolveMode& mode) {
  if (v < 0 || v >= inst.n()) throw Error(Errc::InvalidArgument, "vertex out of range");
  if (inst.terminals().test(v)) throw Error(Errc::TerminalVertex, "vertex " + std::to_string(v) + " is a terminal");
  SolveMode m = mode;
  m.objective = Objective::Any;
  if (!solve(inst, m)) return false;
  return !solve(delete_vertex(inst, v), m).has_value();
}

}  // namespace ddp

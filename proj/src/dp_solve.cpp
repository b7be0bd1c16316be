// Exact DDP over a vertex order taken from a directed path decomposition.
//
// Vertices are introduced one at a time. For every unit request the state
// keeps the fragments its path has formed among introduced vertices. A
// fragment is a pair (start, end): the end is the fragment's last vertex (or
// the target marker once the path's target is reached) and must still have an
// out-neighbour to come; the start is the fragment's first vertex (or the
// source marker). Later vertices can only enter a start through an arc, so a
// start is recorded by the class of introduced vertices that share its set
// of not-yet-introduced in-neighbours; ends are classed the same way by
// their not-yet-introduced out-neighbours. Arcs between two introduced
// vertices never matter again, so two fragments with the same pair of
// classes behave identically from then on.

#include <algorithm>
#include <functional>
#include <map>
#include <unordered_map>

#include "ddp/errors.hpp"
#include "ddp/pathwidth.hpp"

namespace ddp {

namespace {

constexpr int kSource = -1;
constexpr int kTarget = -2;

struct Frag {
  int start, end;
  bool operator<(const Frag& o) const { return start != o.start ? start < o.start : end < o.end; }
  bool operator==(const Frag& o) const = default;
};
using PathState = std::vector<Frag>;

struct Choice {
  bool use = false;
  int pred = -1;  // fragment index, or -1 for none
  int succ = -1;
};

struct Back {
  int parent = -1;
  std::vector<Choice> choice;  // per path, in the parent's path order
  std::vector<int> perm;       // new path position -> parent path position
};

struct VecHash {
  std::size_t operator()(const std::vector<int>& v) const {
    std::size_t h = v.size();
    for (int x : v) h = h * 1000003u ^ static_cast<std::size_t>(x + 7);
    return h;
  }
};

class Dp {
 public:
  Dp(const Instance& inst, const DirectedPathDecomposition& dec, const DpOptions& opt)
      : inst_(inst), g_(inst.graph), n_(inst.n()), opt_(opt) {
    std::vector<char> seen(n_, 0);
    for (const auto& bag : dec.bags) {
      std::vector<int> b = bag;
      std::sort(b.begin(), b.end());
      for (int v : b)
        if (!seen[v]) {
          seen[v] = 1;
          order_.push_back(v);
        }
    }
    pos_.assign(n_, 0);
    for (int i = 0; i < n_; ++i) pos_[order_[i]] = i;
    last_out_.assign(n_, -1);
    last_in_.assign(n_, -1);
    for (auto [a, b] : g_.arcs()) {
      last_out_[a] = std::max(last_out_[a], pos_[b]);
      last_in_[b] = std::max(last_in_[b], pos_[a]);
    }
    req_ = inst.expanded();
    k_ = static_cast<int>(req_.size());
    group_.assign(k_, 0);
    std::map<std::pair<int, int>, int> gid;
    for (int j = 0; j < k_; ++j) group_[j] = gid.emplace(req_[j], static_cast<int>(gid.size())).first->second;
    group_slots_.assign(gid.size(), {});
    for (int j = 0; j < k_; ++j) group_slots_[group_[j]].push_back(j);
    term_ = inst.terminals();
    // rep_[p][v] / rep_out_[p][v]: class representative of introduced
    // vertex v after position p, by future in- / out-neighbours.
    rep_ = classes(true);
    rep_out_ = classes(false);
  }

  std::optional<RoutedSolution> run() {
    if (k_ == 0) return RoutedSolution::from_paths(n_, {});
    std::vector<std::vector<PathState>> cur{std::vector<PathState>(k_)};
    std::vector<std::vector<Back>> backs(n_);
    for (int p = 0; p < n_; ++p) {
      std::vector<std::vector<PathState>> next;
      std::unordered_map<std::vector<int>, int, VecHash> index;
      for (int si = 0; si < static_cast<int>(cur.size()); ++si)
        expand(p, cur[si], [&](std::vector<PathState>&& st, std::vector<Choice>&& ch, std::vector<int>&& perm) {
          auto enc = encode(st);
          auto [it, fresh] = index.emplace(std::move(enc), static_cast<int>(next.size()));
          if (!fresh) return;
          next.push_back(std::move(st));
          backs[p].push_back({si, std::move(ch), std::move(perm)});
          if (next.size() > opt_.state_limit)
            throw Error(Errc::CapExceeded, "dp state count above " + std::to_string(opt_.state_limit));
        });
      if (next.empty()) return std::nullopt;
      cur = std::move(next);
    }
    const auto& fin = cur;
    int goal = -1;
    for (int si = 0; si < static_cast<int>(fin.size()) && goal < 0; ++si) {
      bool ok = true;
      for (const auto& ps : fin[si])
        if (ps.size() != 1 || ps[0].start != kSource || ps[0].end != kTarget) ok = false;
      if (ok) goal = si;
    }
    if (goal < 0) return std::nullopt;
    return replay(backs, goal);
  }

 private:
  const Instance& inst_;
  const Digraph& g_;
  int n_;
  DpOptions opt_;
  std::vector<int> order_, pos_, last_out_, last_in_, group_;
  std::vector<std::pair<int, int>> req_;
  int k_ = 0;
  Bits term_;
  std::vector<std::vector<int>> rep_, rep_out_;

  std::vector<std::vector<int>> classes(bool by_in) const {
    std::vector<std::vector<int>> rep(n_, std::vector<int>(n_, -1));
    for (int p = 0; p < n_; ++p) {
      Bits future(n_);
      for (int q = p + 1; q < n_; ++q) future.set(order_[q]);
      std::map<std::vector<std::uint64_t>, int> cls;
      std::vector<std::vector<std::uint64_t>> keys(p + 1);
      for (int q = 0; q <= p; ++q) {
        const int v = order_[q];
        Bits f = (by_in ? g_.in(v) : g_.out(v)) & future;
        boost::to_block_range(f, std::back_inserter(keys[q]));
        auto it = cls.emplace(keys[q], v).first;
        it->second = std::min(it->second, v);
      }
      for (int q = 0; q <= p; ++q) rep[p][order_[q]] = cls[keys[q]];
    }
    return rep;
  }
  std::vector<std::vector<int>> group_slots_;

  static std::vector<int> encode(const std::vector<PathState>& st) {
    std::vector<int> e;
    for (const auto& ps : st) {
      e.push_back(static_cast<int>(ps.size()));
      for (const auto& f : ps) {
        e.push_back(f.start);
        e.push_back(f.end);
      }
    }
    return e;
  }

  /// Options for path j when vertex w arrives, given its fragments.
  std::vector<Choice> options(int j, int w, const PathState& ps) const {
    const auto [s, t] = req_[j];
    std::vector<Choice> opts;
    if (w != s && w != t) opts.push_back({false, -1, -1});
    if (inst_.restricted && term_.test(w) && w != s && w != t) return opts;
    for (const auto& f : ps)
      if (f.start == kSource && f.end == kTarget) return opts;
    std::vector<int> preds{-1}, succs{-1};
    if (w != s)
      for (int i = 0; i < static_cast<int>(ps.size()); ++i)
        if (ps[i].end >= 0 && g_.has_arc(ps[i].end, w)) preds.push_back(i);
    if (w != t)
      for (int i = 0; i < static_cast<int>(ps.size()); ++i)
        if (ps[i].start >= 0 && g_.has_arc(w, ps[i].start)) succs.push_back(i);
    for (int a : preds)
      for (int b : succs) {
        if (a >= 0 && a == b) continue;
        opts.push_back({true, a, b});
      }
    return opts;
  }

  /// Applies a choice; returns false if the resulting path state is dead.
  bool step(int j, int w, int p, const PathState& ps, const Choice& ch, PathState& out) const {
    const auto [s, t] = req_[j];
    out.clear();
    if (!ch.use) {
      out = ps;
    } else {
      Frag nf;
      nf.start = ch.pred >= 0 ? ps[ch.pred].start : (w == s ? kSource : w);
      nf.end = ch.succ >= 0 ? ps[ch.succ].end : (w == t ? kTarget : w);
      for (int i = 0; i < static_cast<int>(ps.size()); ++i)
        if (i != ch.pred && i != ch.succ) out.push_back(ps[i]);
      out.push_back(nf);
      if (nf.start == kSource && nf.end == kTarget && out.size() > 1) return false;
    }
    for (auto& f : out) {
      if (f.start >= 0) {
        if (last_in_[f.start] <= p) return false;
        f.start = rep_[p][f.start];
      }
      if (f.end >= 0) {
        if (last_out_[f.end] <= p) return false;
        f.end = rep_out_[p][f.end];
      }
    }
    std::sort(out.begin(), out.end());
    return true;
  }

  template <class Emit>
  void expand(int p, const std::vector<PathState>& st, Emit&& emit) const {
    const int w = order_[p];
    std::vector<std::vector<Choice>> opts(k_);
    for (int j = 0; j < k_; ++j) {
      opts[j] = options(j, w, st[j]);
      if (opts[j].empty()) return;
    }
    std::vector<PathState> nst(k_);
    std::vector<Choice> chosen(k_);
    std::function<void(int, int)> rec = [&](int j, int used) {
      if (j == k_) {
        // Canonical order among identical requests: each group's slots keep
        // their positions and receive the group's states in sorted order.
        std::vector<int> final_perm(k_);
        for (const auto& sl : group_slots_) {
          std::vector<int> m = sl;
          std::stable_sort(m.begin(), m.end(), [&](int a, int b) { return nst[a] < nst[b]; });
          for (std::size_t x = 0; x < sl.size(); ++x) final_perm[sl[x]] = m[x];
        }
        std::vector<PathState> out(k_);
        for (int i = 0; i < k_; ++i) out[i] = nst[final_perm[i]];
        emit(std::move(out), std::vector<Choice>(chosen), std::move(final_perm));
        return;
      }
      for (const auto& ch : opts[j]) {
        if (ch.use && used + 1 > inst_.congestion) continue;
        if (!step(j, w, p, st[j], ch, nst[j])) continue;
        chosen[j] = ch;
        rec(j + 1, used + (ch.use ? 1 : 0));
      }
    };
    rec(0, 0);
  }

  RoutedSolution replay(const std::vector<std::vector<Back>>& backs, int goal) const {
    std::vector<const Back*> chain(n_);
    int si = goal;
    for (int p = n_ - 1; p >= 0; --p) {
      chain[p] = &backs[p][si];
      si = backs[p][si].parent;
    }
    // Concrete fragments per path, kept in the same order as the states.
    std::vector<std::vector<std::vector<int>>> frags(k_);
    std::vector<int> who(k_);  // expanded request index carried by each position
    for (int j = 0; j < k_; ++j) who[j] = j;
    for (int p = 0; p < n_; ++p) {
      const int w = order_[p];
      const Back& b = *chain[p];
      std::vector<std::vector<std::vector<int>>> nf(k_);
      for (int j = 0; j < k_; ++j) {
        const auto [s, t] = req_[j];
        const Choice& ch = b.choice[j];
        auto& cur = frags[j];
        if (!ch.use) {
          nf[j] = cur;
        } else {
          std::vector<int> f;
          if (ch.pred >= 0) f = cur[ch.pred];
          f.push_back(w);
          if (ch.succ >= 0) f.insert(f.end(), cur[ch.succ].begin(), cur[ch.succ].end());
          for (int i = 0; i < static_cast<int>(cur.size()); ++i)
            if (i != ch.pred && i != ch.succ) nf[j].push_back(cur[i]);
          nf[j].push_back(f);
        }
        auto keyf = [&](const std::vector<int>& f) {
          Frag k;
          k.start = f.front() == s ? kSource : rep_[p][f.front()];
          k.end = f.back() == t ? kTarget : rep_out_[p][f.back()];
          return k;
        };
        std::sort(nf[j].begin(), nf[j].end(), [&](const auto& x, const auto& y) { return keyf(x) < keyf(y); });
      }
      std::vector<int> nwho(k_);
      for (int i = 0; i < k_; ++i) {
        frags[i] = nf[b.perm[i]];
        nwho[i] = who[b.perm[i]];
      }
      who = nwho;
    }
    // Positions only ever swap within a group of identical requests, so the
    // path at position i serves request i.
    std::vector<std::vector<int>> paths(k_);
    for (int i = 0; i < k_; ++i) paths[i] = frags[i].at(0);
    return RoutedSolution::from_paths(n_, std::move(paths));
  }
};

}  // namespace

std::optional<RoutedSolution> dp_solve(const Instance& inst, const DirectedPathDecomposition& dec, const DpOptions& opt) {
  auto verdict = validate_decomposition(inst.graph, dec);
  if (!verdict.ok) throw Error(Errc::InvalidDecomposition, verdict.message);
  Dp dp(inst, dec, opt);
  return dp.run();
}

}  // namespace ddp

#include "ddp/instance.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "ddp/errors.hpp"
#include "ddp/rng.hpp"

namespace ddp {

int Instance::k() const {
  int k = 0;
  for (const auto& r : requests) k += r.multiplicity;
  return k;
}

std::vector<std::pair<int, int>> Instance::expanded() const {
  std::vector<std::pair<int, int>> e;
  for (const auto& r : requests)
    for (int i = 0; i < r.multiplicity; ++i) e.emplace_back(r.s, r.t);
  return e;
}

Bits Instance::terminals() const {
  Bits b(graph.n());
  for (const auto& r : requests) {
    b.set(r.s);
    b.set(r.t);
  }
  return b;
}

RoutedSolution RoutedSolution::from_paths(int n, std::vector<std::vector<int>> paths) {
  RoutedSolution s;
  s.paths = std::move(paths);
  s.occupancy.assign(n, 0);
  for (const auto& p : s.paths)
    for (int v : p)
      if (v >= 0 && v < n) ++s.occupancy[v];
  return s;
}

std::size_t RoutedSolution::total_length() const {
  std::size_t t = 0;
  for (const auto& p : paths) t += p.size();
  return t;
}

std::vector<Violation> verify_solution(const Instance& inst, const RoutedSolution& sol) {
  const auto req = inst.expanded();
  if (sol.paths.size() != req.size())
    throw Error(Errc::ArityMismatch,
                "expected " + std::to_string(req.size()) + " paths, got " + std::to_string(sol.paths.size()));
  const int n = inst.n();
  std::vector<Violation> out;
  std::vector<int> occ(n, 0);
  const Bits term = inst.terminals();
  for (std::size_t i = 0; i < req.size(); ++i) {
    const auto& p = sol.paths[i];
    const int pi = static_cast<int>(i);
    if (p.size() < 2) {
      out.push_back({pi, -1, "path has fewer than two vertices"});
      continue;
    }
    bool in_range = std::all_of(p.begin(), p.end(), [&](int v) { return v >= 0 && v < n; });
    if (!in_range) {
      out.push_back({pi, -1, "vertex out of range"});
      continue;
    }
    if (p.front() != req[i].first) out.push_back({pi, p.front(), "path does not start at its source"});
    if (p.back() != req[i].second) out.push_back({pi, p.back(), "path does not end at its target"});
    std::vector<char> seen(n, 0);
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (seen[p[j]]++) out.push_back({pi, p[j], "vertex repeated within path"});
      else ++occ[p[j]];
      if (j + 1 < p.size() && !inst.graph.has_arc(p[j], p[j + 1]))
        out.push_back({pi, p[j], "missing arc " + std::to_string(p[j]) + "->" + std::to_string(p[j + 1])});
      if (inst.restricted && j > 0 && j + 1 < p.size() && term.test(p[j]))
        out.push_back({pi, p[j], "terminal used as inner vertex"});
    }
  }
  for (int v = 0; v < n; ++v)
    if (occ[v] > inst.congestion)
      out.push_back({-1, v, "congestion " + std::to_string(occ[v]) + " exceeds " + std::to_string(inst.congestion)});
  if (!sol.occupancy.empty()) {
    if (static_cast<int>(sol.occupancy.size()) != n) out.push_back({-1, -1, "occupancy table has wrong size"});
    else
      for (int v = 0; v < n; ++v)
        if (sol.occupancy[v] != occ[v]) out.push_back({-1, v, "occupancy count disagrees with paths"});
  }
  return out;
}

std::string describe(const std::vector<Violation>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << "; ";
    if (v[i].path >= 0) os << "path " << v[i].path << ": ";
    if (v[i].vertex >= 0) os << "vertex " << v[i].vertex << ": ";
    os << v[i].what;
  }
  return os.str();
}

namespace {

void add_counterexample_copy(Digraph& d, const CounterexampleLayout& L, int t) {
  const int m = 2 * L.n + 2;
  for (int i = 1; i <= m; ++i)
    for (int j = i + 1; j <= m; ++j) {
      if (j == i + 1) {
        d.add_arc(L.u(t, i), L.u(t, j));
        d.add_arc(L.v(t, j), L.v(t, i));
      } else {
        d.add_arc(L.u(t, j), L.u(t, i));
        d.add_arc(L.v(t, i), L.v(t, j));
      }
    }
  for (int i = 1; i <= m; ++i)
    for (int j = 1; j <= m; ++j) {
      if (i == j) d.add_arc(L.u(t, i), L.v(t, j));
      else d.add_arc(L.v(t, j), L.u(t, i));
    }
}

std::vector<std::string> counterexample_names(const CounterexampleLayout& L) {
  std::vector<std::string> names(4 * (L.n + 1) * L.copies);
  for (int t = 0; t < L.copies; ++t)
    for (int i = 1; i <= 2 * L.n + 2; ++i) {
      const std::string suffix = L.copies > 1 ? "@" + std::to_string(t + 1) : "";
      names[L.u(t, i)] = "u_" + std::to_string(i) + suffix;
      names[L.v(t, i)] = "v_" + std::to_string(i) + suffix;
    }
  return names;
}

}  // namespace

Instance counterexample(int n, int c, int tau) {
  if (n < 1 || c < 1 || tau < 1) throw Error(Errc::InvalidArgument, "counterexample needs n, c, tau >= 1");
  CounterexampleLayout L{n, tau};
  const int size = 4 * (n + 1);
  Instance inst;
  inst.graph = Digraph(size * tau);
  for (int t = 0; t < tau; ++t) add_counterexample_copy(inst.graph, L, t);
  for (int a = 0; a < tau; ++a)
    for (int b = a + 1; b < tau; ++b)
      for (int x = 0; x < size; ++x)
        for (int y = 0; y < size; ++y) inst.graph.add_arc(a * size + x, b * size + y);
  const int m = 2 * n + 2;
  for (int t = 0; t < tau; ++t) {
    inst.requests.push_back({L.u(t, 1), L.u(t, m), c});
    inst.requests.push_back({L.v(t, m), L.v(t, 1), c});
  }
  inst.congestion = c;
  inst.names = counterexample_names(L);
  return inst;
}

Instance counterexample_asymmetric(int n) {
  Instance inst = counterexample(n, 1, 1);
  CounterexampleLayout L{n, 1};
  const int m = 2 * n + 2;
  inst.requests = {{L.u(0, 1), L.u(0, m), 2}, {L.v(0, m), L.v(0, 1), 1}};
  inst.congestion = 2;
  return inst;
}

Digraph random_tournament(int n, std::uint64_t seed) { return random_semicomplete(n, 0.0, seed); }

Digraph random_semicomplete(int n, double digon_rate, std::uint64_t seed) {
  if (digon_rate < 0.0 || digon_rate > 1.0) throw Error(Errc::InvalidArgument, "digon_rate outside [0,1]");
  SplitMix64 rng(seed);
  Digraph d(n);
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) {
      if (rng.next() >> 63) d.add_arc(u, v);
      else d.add_arc(v, u);
      if (rng.chance(digon_rate)) {
        d.add_arc(u, v);
        d.add_arc(v, u);
      }
    }
  return d;
}

Instance random_instance(int n, double digon_rate, int k, int c, std::uint64_t seed) {
  if (n < 2) throw Error(Errc::InvalidArgument, "random_instance needs n >= 2");
  SplitMix64 rng(seed);
  Instance inst;
  inst.graph = random_semicomplete(n, digon_rate, rng.next());
  inst.congestion = c;
  for (int i = 0; i < k; ++i) {
    int s = static_cast<int>(rng.below(n));
    int t = static_cast<int>(rng.below(n - 1));
    if (t >= s) ++t;
    inst.requests.push_back({s, t, 1});
  }
  return inst;
}

Instance delete_vertex(const Instance& inst, int v, std::vector<int>* old_index) {
  std::vector<int> keep;
  std::vector<int> pos(inst.n(), -1);
  for (int u = 0; u < inst.n(); ++u)
    if (u != v) {
      pos[u] = static_cast<int>(keep.size());
      keep.push_back(u);
    }
  Instance out;
  out.graph = inst.graph.induced(keep);
  out.congestion = inst.congestion;
  out.restricted = inst.restricted;
  for (const auto& r : inst.requests)
    if (r.s != v && r.t != v) out.requests.push_back({pos[r.s], pos[r.t], r.multiplicity});
  if (!inst.names.empty())
    for (int u : keep) out.names.push_back(inst.names[u]);
  if (old_index) *old_index = keep;
  return out;
}

// ---------------------------------------------------------------------------
// Text formats

TextLines::TextLines(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto hash = line.find('#');
    if (hash != std::string::npos) {
      comments.emplace_back(no, line.substr(hash + 1));
      line.erase(hash);
    }
    auto b = line.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    auto e = line.find_last_not_of(" \t");
    lines.emplace_back(no, line.substr(b, e - b + 1));
  }
}

std::vector<long long> parse_ints(const std::string& line, int lineno) {
  std::vector<long long> v;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) {
    long long x = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), x);
    if (ec != std::errc() || p != tok.data() + tok.size())
      throw Error(Errc::ParseError, "line " + std::to_string(lineno) + ": expected integer, got '" + tok + "'");
    v.push_back(x);
  }
  return v;
}

namespace {

[[noreturn]] void parse_fail(int lineno, const std::string& why) {
  throw Error(Errc::ParseError, "line " + std::to_string(lineno) + ": " + why);
}

std::vector<std::string> words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> w;
  std::string t;
  while (in >> t) w.push_back(t);
  return w;
}

}  // namespace

Instance read_instance(const std::string& text) {
  TextLines tl(text);
  const auto& L = tl.lines;
  std::size_t i = 0;
  auto need = [&](const char* what) {
    if (i >= L.size()) parse_fail(L.empty() ? 1 : L.back().first, std::string("unexpected end of input, expected ") + what);
  };
  need("header");
  if (words(L[i].second) != std::vector<std::string>{"ddp", "1"}) parse_fail(L[i].first, "expected 'ddp 1'");
  ++i;
  need("size line");
  auto w = words(L[i].second);
  if (w.size() != 6 || w[0] != "n" || w[2] != "c" || w[4] != "restricted")
    parse_fail(L[i].first, "expected 'n <int> c <int> restricted <0|1>'");
  auto nums = parse_ints(w[1] + " " + w[3] + " " + w[5], L[i].first);
  if (nums[0] < 0 || nums[0] > 1000000) parse_fail(L[i].first, "bad vertex count");
  if (nums[1] < 1) parse_fail(L[i].first, "congestion must be >= 1");
  if (nums[2] != 0 && nums[2] != 1) parse_fail(L[i].first, "restricted must be 0 or 1");
  Instance inst;
  const int n = static_cast<int>(nums[0]);
  inst.graph = Digraph(n);
  inst.congestion = static_cast<int>(nums[1]);
  inst.restricted = nums[2] == 1;
  ++i;
  need("'arcs'");
  if (L[i].second != "arcs") parse_fail(L[i].first, "expected 'arcs'");
  ++i;
  for (;; ++i) {
    need("'end'");
    if (L[i].second == "end") break;
    auto a = parse_ints(L[i].second, L[i].first);
    if (a.size() != 2) parse_fail(L[i].first, "arc line needs two integers");
    if (a[0] < 0 || a[1] < 0 || a[0] >= n || a[1] >= n) parse_fail(L[i].first, "arc endpoint out of range");
    if (a[0] == a[1]) parse_fail(L[i].first, "loop arc");
    if (inst.graph.has_arc(static_cast<int>(a[0]), static_cast<int>(a[1]))) parse_fail(L[i].first, "duplicate arc");
    inst.graph.add_arc(static_cast<int>(a[0]), static_cast<int>(a[1]));
  }
  ++i;
  need("'requests'");
  if (L[i].second != "requests") parse_fail(L[i].first, "expected 'requests'");
  ++i;
  for (;; ++i) {
    need("'end'");
    if (L[i].second == "end") break;
    auto r = parse_ints(L[i].second, L[i].first);
    if (r.size() != 3) parse_fail(L[i].first, "request line needs three integers");
    if (r[0] < 0 || r[1] < 0 || r[0] >= n || r[1] >= n) parse_fail(L[i].first, "request endpoint out of range");
    if (r[0] == r[1]) parse_fail(L[i].first, "request with s == t");
    if (r[2] < 1) parse_fail(L[i].first, "multiplicity must be >= 1");
    inst.requests.push_back({static_cast<int>(r[0]), static_cast<int>(r[1]), static_cast<int>(r[2])});
  }
  ++i;
  if (i < L.size()) parse_fail(L[i].first, "unexpected trailing section '" + L[i].second + "'");
  for (const auto& [no, c] : tl.comments) {
    auto cw = words(c);
    if (cw.size() == 3 && cw[0] == "name") {
      auto idx = parse_ints(cw[1], no);
      if (idx[0] < 0 || idx[0] >= n) parse_fail(no, "name for vertex out of range");
      if (inst.names.empty()) inst.names.assign(n, "");
      inst.names[idx[0]] = cw[2];
    }
  }
  return inst;
}

std::string write_instance(const Instance& inst) {
  std::ostringstream os;
  os << "ddp 1\n";
  os << "n " << inst.n() << " c " << inst.congestion << " restricted " << (inst.restricted ? 1 : 0) << "\n";
  for (std::size_t v = 0; v < inst.names.size(); ++v)
    if (!inst.names[v].empty()) os << "# name " << v << " " << inst.names[v] << "\n";
  os << "arcs\n";
  for (auto [u, v] : inst.graph.arcs()) os << u << " " << v << "\n";
  os << "end\nrequests\n";
  for (const auto& r : inst.requests) os << r.s << " " << r.t << " " << r.multiplicity << "\n";
  os << "end\n";
  return os.str();
}

RoutedSolution read_solution(const std::string& text, int n) {
  TextLines tl(text);
  if (tl.lines.empty() || words(tl.lines[0].second) != std::vector<std::string>{"sol", "1"})
    parse_fail(tl.lines.empty() ? 1 : tl.lines[0].first, "expected 'sol 1'");
  std::vector<std::vector<int>> paths;
  for (std::size_t i = 1; i < tl.lines.size(); ++i) {
    auto p = parse_ints(tl.lines[i].second, tl.lines[i].first);
    std::vector<int> path;
    for (auto x : p) {
      if (x < 0 || x >= n) parse_fail(tl.lines[i].first, "vertex out of range");
      path.push_back(static_cast<int>(x));
    }
    paths.push_back(std::move(path));
  }
  return RoutedSolution::from_paths(n, std::move(paths));
}

std::string write_solution(const RoutedSolution& sol) {
  std::ostringstream os;
  os << "sol 1\n";
  for (const auto& p : sol.paths) {
    for (std::size_t i = 0; i < p.size(); ++i) os << (i ? " " : "") << p[i];
    os << "\n";
  }
  return os.str();
}

}  // namespace ddp

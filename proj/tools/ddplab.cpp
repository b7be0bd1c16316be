// ddplab: batch front-end for the library.
//
// Files go to standard output, diagnostics to standard error. The first
// stderr line names the effective seed; the last one is a status record of
// the form "status=<word> exit=<code> [reason=...]".
//
// Exit codes: 0 success or feasible, 1 infeasible or property violation,
// 2 usage or input error, 3 budget or cap exceeded.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>

#include "ddp/errors.hpp"
#include "ddp/instance.hpp"
#include "ddp/irrelevant.hpp"
#include "ddp/pathwidth.hpp"
#include "ddp/reductions.hpp"
#include "ddp/solver.hpp"
#include "ddp/triples.hpp"

namespace {

using namespace ddp;

constexpr int kExitOk = 0;
constexpr int kExitNo = 1;
constexpr int kExitUsage = 2;
constexpr int kExitBudget = 3;

struct Global {
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string in;          // instance input; "-" or empty is stdin
  std::string trace_path;  // --emit-trace target
};

std::string read_all(const std::string& path) {
  if (path.empty() || path == "-") {
    return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
  }
  std::ifstream f(path);
  if (!f) throw Error(Errc::InvalidArgument, "cannot open " + path);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw Error(Errc::InvalidArgument, "cannot write " + path);
  f << text;
}

void emit_trace(const Global& g, const std::vector<std::string>& lines) {
  if (g.trace_path.empty()) return;
  std::ostringstream os;
  for (const auto& l : lines) os << l << '\n';
  if (g.trace_path == "-")
    std::cerr << os.str();
  else
    write_file(g.trace_path, os.str());
}

int status(const std::string& word, int code, const std::string& reason = "") {
  std::cerr << "status=" << word << " exit=" << code;
  if (!reason.empty()) {
    std::string r = reason;
    for (char& ch : r)
      if (ch == '\n') ch = ' ';
    std::cerr << " reason=" << r;
  }
  std::cerr << std::endl;
  return code;
}

int exit_for(Errc e) {
  switch (e) {
    case Errc::CapExceeded:
    case Errc::BudgetExceeded:
      return kExitBudget;
    case Errc::NotSatisfying:
    case Errc::InvalidSolution:
    case Errc::NotAClique:
    case Errc::NotMinimal:
    case Errc::NoGapFound:
    case Errc::InvalidDecomposition:
    case Errc::PreconditionFailed:
    case Errc::TripleTooSmall:
    case Errc::NoFreePairAvailable:
    case Errc::TerminalVertex:
      return kExitNo;
    default:
      return kExitUsage;
  }
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

// ---------------------------------------------------------------------------
// Threshold flags shared by irrelevant and winwin

struct ThresholdFlags {
  std::string preset = "desk";
  long long f = -1, x = -1, m1 = -1, d1 = -1, m2 = -1, d2 = -1;

  void add(CLI::App* app) {
    app->add_option("--thresholds", preset, "default (proof formulas) or desk (small values)")
        ->check(CLI::IsMember({"default", "desk"}));
    app->add_option("--f", f, "triple size searched by winwin");
    app->add_option("--x", x, "minimum size of X");
    app->add_option("--m1", m1, "round-one degree threshold");
    app->add_option("--d1", d1, "round-one Gamma factor");
    app->add_option("--m2", m2, "round-two degree threshold");
    app->add_option("--d2", d2, "round-two Gamma' factor");
  }

  Thresholds resolve(const Instance& inst, long long desk_f) const {
    Thresholds th = preset == "default" ? Thresholds::defaults(inst.k(), inst.congestion) : Thresholds::desk(desk_f);
    if (f >= 0) th.f = f;
    if (x >= 0) th.x = x;
    if (m1 >= 0) th.m1 = m1;
    if (d1 >= 0) th.d1 = d1;
    if (m2 >= 0) th.m2 = m2;
    if (d2 >= 0) th.d2 = d2;
    return th;
  }
};

void print_thresholds(const Thresholds& th) {
  std::cerr << "thresholds f=" << th.f << " x=" << th.x << " m1=" << th.m1 << " d1=" << th.d1 << " m2=" << th.m2
            << " d2=" << th.d2 << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ddplab: disjoint paths with congestion on semicomplete digraphs"};
  app.require_subcommand(1);
  // Global flags may also follow a subcommand (`reduce ... --seed 9`).
  app.fallthrough();
  Global g;
  app.add_option("--seed", g.seed, "seed for every random choice")->capture_default_str();
  app.add_option("--jobs", g.jobs, "worker threads for searches (output does not depend on it)")
      ->check(CLI::PositiveNumber);
  app.add_option("--emit-trace", g.trace_path, "write the step log to this file ('-' for stderr)");

  // gen ---------------------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "generate an instance");
  gen->require_subcommand(1);
  int ce_n = 2, ce_c = 1, ce_tau = 1;
  bool ce_asym = false;
  auto* gen_ce = gen->add_subcommand("counterexample", "the counterexample family");
  gen_ce->add_option("--n", ce_n)->check(CLI::PositiveNumber);
  gen_ce->add_option("--c", ce_c)->check(CLI::PositiveNumber);
  gen_ce->add_option("--tau", ce_tau)->check(CLI::PositiveNumber);
  gen_ce->add_flag("--asymmetric", ce_asym, "two forward requests and one reverse, c = 2");
  int rnd_n = 8, rnd_k = 2, rnd_c = 1;
  double rnd_digon = 0.0;
  auto* gen_rnd = gen->add_subcommand("random", "random semicomplete instance");
  gen_rnd->add_option("--n", rnd_n)->check(CLI::Range(2, 1 << 20));
  gen_rnd->add_option("--k", rnd_k)->check(CLI::NonNegativeNumber);
  gen_rnd->add_option("--c", rnd_c)->check(CLI::PositiveNumber);
  gen_rnd->add_option("--digon-rate", rnd_digon)->check(CLI::Range(0.0, 1.0));
  int pt_k = 3, pt_pad = 3, pt_req = 1, pt_c = 1;
  std::string pt_triple_out;
  auto* gen_pt = gen->add_subcommand("planted-triple", "semicomplete instance holding a planted triple");
  gen_pt->add_option("--k", pt_k)->check(CLI::PositiveNumber);
  gen_pt->add_option("--padding", pt_pad)->check(CLI::Range(2, 1 << 20));
  gen_pt->add_option("--requests", pt_req)->check(CLI::PositiveNumber);
  gen_pt->add_option("--c", pt_c)->check(CLI::PositiveNumber);
  gen_pt->add_option("--triple-out", pt_triple_out, "also write the planted triple here");

  // reduce ------------------------------------------------------------------
  auto* red = app.add_subcommand("reduce", "build a reduction instance");
  red->require_subcommand(1);
  int vars = 3, ratio = 2, mq = 2, mn = 2, mc = 2;
  double eps = 0.5, mp = 0.5;
  bool no_plant = false, c2_ratio = false;
  auto add_vars = [&](CLI::App* a) { a->add_option("--vars", vars, "variable count (multiple of 3)"); };
  auto* red_st = red->add_subcommand("sat-tournament", "(3,1)-3-SAT to tournament");
  add_vars(red_st);
  auto* red_rs = red->add_subcommand("restricted", "restricted construction with c = |K'| / d");
  add_vars(red_rs);
  red_rs->add_option("--d", ratio);
  auto* red_ep = red->add_subcommand("epsilon", "unrestricted construction with c = |K|^eps");
  add_vars(red_ep);
  red_ep->add_option("--epsilon", eps);
  auto* red_c2 = red->add_subcommand("c2", "two-clique construction");
  add_vars(red_c2);
  red_c2->add_option("--ratio", ratio, "pad so that |K| / c equals this")->each([&](const std::string&) { c2_ratio = true; });
  auto add_mcc = [&](CLI::App* a) {
    a->add_option("--q", mq, "colour classes")->check(CLI::PositiveNumber);
    a->add_option("--n", mn, "class size")->check(CLI::PositiveNumber);
    a->add_option("--p", mp, "edge probability")->check(CLI::Range(0.0, 1.0));
    a->add_flag("--no-plant", no_plant, "do not plant a clique");
  };
  auto* red_mcc = red->add_subcommand("mcc", "multicoloured clique construction");
  add_mcc(red_mcc);
  auto* red_mccc = red->add_subcommand("mcc-congested", "clique construction with the congested extension");
  add_mcc(red_mccc);
  red_mccc->add_option("--c", mc)->check(CLI::Range(2, 1 << 20));
  auto* red_bu = red->add_subcommand("blowup", "congestion blowup of an instance read from --in/stdin");
  red_bu->add_option("--in", g.in);

  // solve / dpw / triple / irrelevant / winwin / verify ------------------------
  std::string mode = "any";
  double time_limit = 0.0;
  std::uint64_t node_limit = 0;
  auto* solve_cmd = app.add_subcommand("solve", "solve an instance");
  solve_cmd->add_option("--in", g.in);
  solve_cmd->add_option("--mode", mode)->check(CLI::IsMember({"any", "min", "enumerate"}));
  solve_cmd->add_option("--time-limit", time_limit, "seconds, 0 for none");
  solve_cmd->add_option("--node-limit", node_limit, "search nodes, 0 for none");
  std::string dec_path;
  auto* dpw_cmd = app.add_subcommand("dpw", "exact directed pathwidth, or dp_solve with --solve");
  dpw_cmd->add_option("--in", g.in);
  bool dpw_solve = false;
  dpw_cmd->add_flag("--solve", dpw_solve, "also run the decomposition DP and print the solution");
  auto* tri = app.add_subcommand("triple", "k-triples");
  tri->require_subcommand(1);
  int tri_k = 2;
  auto* tri_find = tri->add_subcommand("find", "search for a k-triple");
  tri_find->add_option("--in", g.in);
  tri_find->add_option("--k", tri_k)->check(CLI::PositiveNumber);
  std::string triple_path;
  int irr_find_k = 0;
  ThresholdFlags irr_th, ww_th;
  auto* irr = app.add_subcommand("irrelevant", "special vertex of a triple, with oracle re-check");
  irr->add_option("--in", g.in);
  irr->add_option("--triple", triple_path, "ktriple file; searched among non-terminals when absent");
  irr->add_option("--find-k", irr_find_k, "triple size to search for when --triple is absent");
  irr_th.add(irr);
  auto* ww = app.add_subcommand("winwin", "delete irrelevant vertices, then solve over a decomposition");
  ww->add_option("--in", g.in);
  ww_th.add(ww);
  std::string sol_path;
  auto* ver = app.add_subcommand("verify", "check a solution against an instance");
  ver->add_option("--in", g.in, "instance file");
  ver->add_option("--solution", sol_path, "solution file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    if (rc == 0) return 0;  // --help
    return status("usage", kExitUsage, e.what());
  }
  std::cerr << "seed=" << g.seed << '\n';

  try {
    // gen
    if (gen_ce->parsed()) {
      auto inst = ce_asym ? counterexample_asymmetric(ce_n) : counterexample(ce_n, ce_c, ce_tau);
      std::cout << write_instance(inst);
      return status("ok", kExitOk);
    }
    if (gen_rnd->parsed()) {
      std::cout << write_instance(random_instance(rnd_n, rnd_digon, rnd_k, rnd_c, g.seed));
      return status("ok", kExitOk);
    }
    if (gen_pt->parsed()) {
      KTriple t;
      auto inst = planted_triple_instance(pt_k, pt_pad, pt_req, pt_c, g.seed, &t);
      std::cout << write_instance(inst);
      if (!pt_triple_out.empty()) write_file(pt_triple_out, write_triple(t));
      return status("ok", kExitOk);
    }

    // reduce
    if (red_st->parsed() || red_rs->parsed() || red_ep->parsed() || red_c2->parsed()) {
      auto sat = random_sat31(vars, g.seed);
      ReductionArtifact art;
      if (red_st->parsed()) art = reduce_sat_to_tournament(sat);
      if (red_rs->parsed()) art = reduce_restricted(sat, ratio);
      if (red_ep->parsed()) art = reduce_epsilon(sat, eps);
      if (red_c2->parsed()) art = reduce_c2(sat, c2_ratio ? std::optional<int>(ratio) : std::nullopt);
      std::cout << write_instance(art.instance);
      std::cerr << "source satisfiable=" << yes_no(sat_brute_force(sat).has_value()) << " n=" << art.instance.n()
                << " k=" << art.instance.k() << " c=" << art.instance.congestion << '\n';
      return status("ok", kExitOk);
    }
    if (red_mcc->parsed() || red_mccc->parsed()) {
      auto mcc = random_mcc(mq, mn, mp, g.seed, !no_plant);
      auto art = reduce_mcc(mcc);
      if (red_mccc->parsed()) art = mcc_congested_extension(art, mc);
      std::cout << write_instance(art.instance);
      std::cerr << "source clique=" << yes_no(mcc_brute_force(mcc).has_value()) << " n=" << art.instance.n()
                << " k=" << art.instance.k() << " c=" << art.instance.congestion << '\n';
      return status("ok", kExitOk);
    }
    if (red_bu->parsed()) {
      std::cout << write_instance(congestion_blowup(read_instance(read_all(g.in))));
      return status("ok", kExitOk);
    }

    // solve
    if (solve_cmd->parsed()) {
      auto inst = read_instance(read_all(g.in));
      SolveMode m;
      m.time_limit_s = time_limit;
      m.node_limit = node_limit;
      if (mode == "enumerate") {
        m.objective = Objective::EnumerateAll;
        auto all = enumerate_solutions(inst, m);
        for (const auto& s : all) std::cout << write_solution(s);
        std::cerr << "solutions=" << all.size() << '\n';
        return all.empty() ? status("infeasible", kExitNo) : status("feasible", kExitOk);
      }
      m.objective = mode == "min" ? Objective::MinTotalLength : Objective::Any;
      auto sol = solve(inst, m);
      if (!sol) return status("infeasible", kExitNo);
      std::cout << write_solution(*sol);
      std::cerr << "total_length=" << sol->total_length() << '\n';
      return status("feasible", kExitOk);
    }

    // dpw
    if (dpw_cmd->parsed()) {
      auto inst = read_instance(read_all(g.in));
      auto [w, dec] = exact_dpw(inst.graph);
      std::cerr << "width=" << w << '\n';
      if (!dpw_solve) {
        std::cout << write_decomposition(dec);
        return status("ok", kExitOk);
      }
      auto sol = dp_solve(inst, dec);
      if (!sol) return status("infeasible", kExitNo);
      std::cout << write_solution(*sol);
      return status("feasible", kExitOk);
    }

    // triple find
    if (tri_find->parsed()) {
      auto inst = read_instance(read_all(g.in));
      TripleSearch s;
      s.jobs = g.jobs;
      auto t = find_triple(inst.graph, tri_k, &s);
      std::cerr << "search=" << (s.exact ? "exact" : "heuristic") << " b_sets=" << s.b_sets << '\n';
      if (!t) return status(s.exact ? "none" : "not-found", kExitNo);
      std::cout << write_triple(*t);
      return status("found", kExitOk);
    }

    // irrelevant
    if (irr->parsed()) {
      auto inst = read_instance(read_all(g.in));
      KTriple t;
      if (!triple_path.empty()) {
        t = read_triple(read_all(triple_path), inst.n());
      } else {
        if (irr_find_k < 1) return status("usage", kExitUsage, "give --triple or --find-k");
        const Bits term = inst.terminals();
        std::vector<int> keep;
        for (int v = 0; v < inst.n(); ++v)
          if (!term.test(v)) keep.push_back(v);
        TripleSearch s;
        s.jobs = g.jobs;
        auto local = find_triple(inst.graph.induced(keep), irr_find_k, &s);
        if (!local) return status("no-triple", kExitNo);
        for (int a : local->A) t.A.push_back(keep[a]);
        for (int b : local->B) t.B.push_back(keep[b]);
        for (int c : local->C) t.C.push_back(keep[c]);
      }
      auto th = irr_th.resolve(inst, t.k());
      print_thresholds(th);
      auto res = find_irrelevant_vertex(inst, t, th);
      emit_trace(g, res.trace);
      std::cout << res.vertex << '\n';
      std::cerr << "oracle_checked=" << yes_no(res.oracle_checked) << " oracle_irrelevant=" << yes_no(res.oracle_irrelevant)
                << " certified=" << yes_no(res.certified) << '\n';
      if (res.oracle_checked && !res.oracle_irrelevant) return status("relevant", kExitNo);
      return status(res.oracle_checked ? "irrelevant" : "unverified", kExitOk);
    }

    // winwin
    if (ww->parsed()) {
      auto inst = read_instance(read_all(g.in));
      auto th = ww_th.resolve(inst, 2);
      print_thresholds(th);
      WinwinOptions opt;
      opt.jobs = g.jobs;
      auto res = winwin_solve(inst, th, opt);
      emit_trace(g, res.trace);
      std::cerr << "deleted=" << res.deleted.size() << " width=" << res.final_width << '\n';
      if (!res.solution) return status("infeasible", kExitNo);
      std::cout << write_solution(*res.solution);
      return status("feasible", kExitOk);
    }

    // verify
    if (ver->parsed()) {
      auto inst = read_instance(read_all(g.in));
      auto sol = read_solution(read_all(sol_path), inst.n());
      auto bad = verify_solution(inst, sol);
      if (bad.empty()) {
        std::cout << "ok\n";
        return status("valid", kExitOk);
      }
      std::cout << describe(bad);
      return status("invalid", kExitNo, bad.front().what);
    }
  } catch (const Error& e) {
    return status(errc_name(e.code()), exit_for(e.code()), e.reason());
  } catch (const std::exception& e) {
    return status("error", kExitUsage, e.what());
  }
  return status("usage", kExitUsage, "no command");
}

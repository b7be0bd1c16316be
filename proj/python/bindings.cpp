// Python bindings for the ddp library.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ddp/digraph.hpp"
#include "ddp/errors.hpp"
#include "ddp/instance.hpp"
#include "ddp/irrelevant.hpp"
#include "ddp/pathwidth.hpp"
#include "ddp/reductions.hpp"
#include "ddp/solver.hpp"
#include "ddp/triples.hpp"

namespace py = pybind11;
using namespace ddp;

namespace {

SolveMode make_mode(const std::string& objective, double time_limit_s, std::uint64_t node_limit) {
  SolveMode m;
  if (objective == "any") m.objective = Objective::Any;
  else if (objective == "min") m.objective = Objective::MinTotalLength;
  else if (objective == "enumerate") m.objective = Objective::EnumerateAll;
  else throw Error(Errc::InvalidArgument, "objective must be any, min or enumerate");
  m.time_limit_s = time_limit_s;
  m.node_limit = node_limit;
  return m;
}

}  // namespace

PYBIND11_MODULE(_ddplab, m) {
  m.doc() = "Disjoint paths with congestion on semicomplete digraphs";

  static py::exception<Error> error(m, "DdpError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error.ptr())(e.what());
      exc.attr("code") = errc_name(e.code());
      exc.attr("reason") = e.reason();
      PyErr_SetObject(error.ptr(), exc.ptr());
    }
  });

  py::class_<Digraph>(m, "Digraph")
      .def(py::init<int>(), py::arg("n"))
      .def_property_readonly("n", &Digraph::n)
      .def("add_arc", &Digraph::add_arc)
      .def("remove_arc", &Digraph::remove_arc)
      .def("has_arc", &Digraph::has_arc)
      .def("arcs", &Digraph::arcs)
      .def("arc_count", &Digraph::arc_count)
      .def("__eq__", [](const Digraph& a, const Digraph& b) { return a == b; });

  m.def("is_tournament", &is_tournament);
  m.def("is_semicomplete", &is_semicomplete);
  m.def("independence_number", [](const Digraph& d) { return independence_number(d); });

  py::class_<Request>(m, "Request")
      .def(py::init<int, int, int>(), py::arg("s"), py::arg("t"), py::arg("multiplicity") = 1)
      .def_readwrite("s", &Request::s)
      .def_readwrite("t", &Request::t)
      .def_readwrite("multiplicity", &Request::multiplicity)
      .def("__repr__", [](const Request& r) {
        return "Request(" + std::to_string(r.s) + ", " + std::to_string(r.t) + ", " + std::to_string(r.multiplicity) + ")";
      });

  py::class_<Instance>(m, "Instance")
      .def(py::init<>())
      .def_readwrite("graph", &Instance::graph)
      .def_readwrite("requests", &Instance::requests)
      .def_readwrite("congestion", &Instance::congestion)
      .def_readwrite("restricted", &Instance::restricted)
      .def_readwrite("names", &Instance::names)
      .def_property_readonly("n", &Instance::n)
      .def_property_readonly("k", &Instance::k)
      .def("expanded", &Instance::expanded)
      .def("to_text", [](const Instance& i) { return write_instance(i); })
      .def_static("from_text", &read_instance)
      .def("__eq__", [](const Instance& a, const Instance& b) { return a == b; });

  py::class_<RoutedSolution>(m, "RoutedSolution")
      .def_static("from_paths", &RoutedSolution::from_paths, py::arg("n"), py::arg("paths"))
      .def_readonly("paths", &RoutedSolution::paths)
      .def_readonly("occupancy", &RoutedSolution::occupancy)
      .def("total_length", &RoutedSolution::total_length)
      .def("to_text", [](const RoutedSolution& s) { return write_solution(s); })
      .def_static("from_text", &read_solution)
      .def("__eq__", [](const RoutedSolution& a, const RoutedSolution& b) { return a == b; });

  m.def(
      "verify_solution",
      [](const Instance& inst, const RoutedSolution& sol) {
        std::vector<std::string> out;
        for (const auto& v : verify_solution(inst, sol)) out.push_back(v.what);
        return out;
      },
      "Violations as strings; empty when the solution is valid.");

  m.def("counterexample", &counterexample, py::arg("n"), py::arg("c") = 1, py::arg("tau") = 1);
  m.def("counterexample_asymmetric", &counterexample_asymmetric, py::arg("n"));
  m.def("random_instance", &random_instance, py::arg("n"), py::arg("digon_rate"), py::arg("k"), py::arg("c"),
        py::arg("seed"));
  m.def("delete_vertex", [](const Instance& inst, int v) { return delete_vertex(inst, v); });

  m.def(
      "solve",
      [](const Instance& inst, const std::string& objective, double time_limit_s, std::uint64_t node_limit) {
        py::gil_scoped_release release;
        return solve(inst, make_mode(objective, time_limit_s, node_limit));
      },
      py::arg("inst"), py::arg("objective") = "any", py::arg("time_limit_s") = 0.0, py::arg("node_limit") = 0);
  m.def(
      "enumerate_solutions",
      [](const Instance& inst, double time_limit_s) {
        py::gil_scoped_release release;
        return enumerate_solutions(inst, make_mode("enumerate", time_limit_s, 0));
      },
      py::arg("inst"), py::arg("time_limit_s") = 0.0);
  m.def("is_relevant", [](const Instance& inst, int v) { return is_relevant(inst, v); });
  m.def("is_minimal", &is_minimal);
  m.def("has_shortcut", [](const Instance& inst, const RoutedSolution& sol, int i) {
    return find_shortcut(inst, sol, i).has_value();
  });

  m.def(
      "exact_dpw",
      [](const Digraph& d) {
        auto [w, dec] = exact_dpw(d);
        return py::make_tuple(w, dec.bags);
      },
      "Returns (width, bags).");
  m.def("validate_decomposition", [](const Digraph& d, const std::vector<std::vector<int>>& bags) {
    auto v = validate_decomposition(d, {bags});
    return py::make_tuple(v.ok, v.condition, v.message);
  });
  m.def("dp_solve", [](const Instance& inst, const std::vector<std::vector<int>>& bags) {
    py::gil_scoped_release release;
    return dp_solve(inst, {bags});
  });

  py::class_<KTriple>(m, "KTriple")
      .def(py::init<>())
      .def(py::init([](std::vector<int> A, std::vector<int> B, std::vector<int> C) { return KTriple{A, B, C}; }))
      .def_readwrite("A", &KTriple::A)
      .def_readwrite("B", &KTriple::B)
      .def_readwrite("C", &KTriple::C)
      .def_property_readonly("k", &KTriple::k);
  m.def("validate_triple", [](const Digraph& d, const KTriple& t) { return validate_triple(d, t).ok; });
  m.def(
      "find_triple",
      [](const Digraph& d, int k, int jobs) {
        TripleSearch s;
        s.jobs = jobs;
        py::gil_scoped_release release;
        return find_triple(d, k, &s);
      },
      py::arg("d"), py::arg("k"), py::arg("jobs") = 1);
  m.def(
      "planted_triple_instance",
      [](int k, int padding, int requests, int c, std::uint64_t seed) {
        KTriple t;
        auto inst = planted_triple_instance(k, padding, requests, c, seed, &t);
        return py::make_tuple(inst, t);
      },
      py::arg("k"), py::arg("padding"), py::arg("requests"), py::arg("c"), py::arg("seed"));

  py::class_<Sat31Instance>(m, "Sat31Instance")
      .def_readonly("n_vars", &Sat31Instance::n_vars)
      .def_property_readonly("clauses",
                             [](const Sat31Instance& s) {
                               std::vector<std::vector<int>> out;
                               for (const auto& c : s.clauses) {
                                 out.emplace_back();
                                 for (const auto& l : c) out.back().push_back(l.positive ? l.var + 1 : -(l.var + 1));
                               }
                               return out;
                             })
      .def("satisfied_by", &Sat31Instance::satisfied_by);
  m.def("random_sat31", &random_sat31, py::arg("n_vars"), py::arg("seed"));
  m.def("sat_brute_force", &sat_brute_force);

  py::class_<MccInstance>(m, "MccInstance")
      .def_readonly("classes", &MccInstance::classes)
      .def("has_edge", &MccInstance::has_edge);
  m.def(
      "random_mcc", [](int q, int n, double p, std::uint64_t seed, bool plant) { return random_mcc(q, n, p, seed, plant); },
      py::arg("q"), py::arg("n"), py::arg("p"), py::arg("seed"), py::arg("plant") = true);
  m.def("mcc_brute_force", &mcc_brute_force);

  py::class_<ReductionArtifact>(m, "ReductionArtifact")
      .def_readonly("instance", &ReductionArtifact::instance)
      .def_readonly("critical_path", &ReductionArtifact::critical_path)
      .def_property_readonly("bags",
                             [](const ReductionArtifact& a) -> std::optional<std::vector<std::vector<int>>> {
                               if (!a.decomposition) return std::nullopt;
                               return a.decomposition->bags;
                             })
      .def("vertex", &ReductionArtifact::vertex)
      .def("label", &ReductionArtifact::label);
  m.def("reduce_sat_to_tournament", &reduce_sat_to_tournament);
  m.def("reduce_restricted", &reduce_restricted, py::arg("sat"), py::arg("d"));
  m.def("reduce_epsilon", &reduce_epsilon, py::arg("sat"), py::arg("epsilon"));
  m.def("reduce_c2", &reduce_c2, py::arg("sat"), py::arg("ratio_d") = std::nullopt);
  m.def("sat_solution_from_assignment", &sat_solution_from_assignment);
  m.def("sat_assignment_from_solution", &sat_assignment_from_solution);
  m.def("reduce_mcc", &reduce_mcc);
  m.def("mcc_congested_extension", &mcc_congested_extension, py::arg("art"), py::arg("c"));
  m.def("mcc_solution_from_clique", &mcc_solution_from_clique);
  m.def("mcc_clique_from_solution", &mcc_clique_from_solution);
  m.def("congestion_blowup", &congestion_blowup);

  py::class_<Thresholds>(m, "Thresholds")
      .def_static("defaults", &Thresholds::defaults, py::arg("k"), py::arg("c"), py::arg("h") = 0)
      .def_static("desk", &Thresholds::desk, py::arg("f"), py::arg("x") = 1, py::arg("m1") = 1, py::arg("d1") = 1,
                  py::arg("m2") = 1, py::arg("d2") = 1)
      .def_readwrite("f", &Thresholds::f)
      .def_readwrite("x", &Thresholds::x)
      .def_readwrite("m1", &Thresholds::m1)
      .def_readwrite("d1", &Thresholds::d1)
      .def_readwrite("m2", &Thresholds::m2)
      .def_readwrite("d2", &Thresholds::d2);
  m.def("find_irrelevant_vertex", [](const Instance& inst, const KTriple& t, const Thresholds& th) {
    auto r = find_irrelevant_vertex(inst, t, th);
    return py::make_tuple(r.vertex, r.oracle_checked && r.oracle_irrelevant);
  }, "Returns (vertex, oracle_confirmed).");
  m.def(
      "winwin_solve",
      [](const Instance& inst, const Thresholds& th, int jobs) {
        WinwinOptions opt;
        opt.jobs = jobs;
        auto r = winwin_solve(inst, th, opt);
        return py::make_tuple(r.solution, r.deleted, r.final_width);
      },
      py::arg("inst"), py::arg("th"), py::arg("jobs") = 1, "Returns (solution or None, deleted, final_width).");
}

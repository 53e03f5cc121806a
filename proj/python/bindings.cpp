#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "meteor/experiment.hpp"

namespace py = pybind11;
using namespace meteor;

namespace {

MassState state_of(const Graph& g, const std::vector<double>& masses) {
  MassState s{masses, 0.0};
  validate_state(g, s);
  return s;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Meteor mass-redistribution simulator";

  static py::exception<Error> error(m, "MeteorError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      error(e.what());
    }
  });

  py::class_<Graph>(m, "Graph")
      .def_static("cycle", &Graph::cycle, py::arg("k"))
      .def_static("torus", &Graph::torus, py::arg("side"), py::arg("d"))
      .def_static("window", &Graph::window, py::arg("side"), py::arg("d"))
      .def_property_readonly("vertex_count", &Graph::vertex_count)
      .def_property_readonly("side", &Graph::side)
      .def_property_readonly("dimension", &Graph::dimension)
      .def("degree", &Graph::degree)
      .def("neighbors", [](const Graph& g, Vertex v) {
        const auto nb = g.neighbors(v);
        return std::vector<Vertex>(nb.begin(), nb.end());
      })
      .def("__repr__", &Graph::describe);

  m.def(
      "simulate",
      [](const Graph& g, const std::vector<double>& masses, double horizon, std::uint64_t seed) {
        return simulate(g, state_of(g, masses), EventLog::sample(g, horizon, seed), horizon).masses;
      },
      py::arg("graph"), py::arg("masses"), py::arg("horizon"), py::arg("seed"),
      "Masses at `horizon` on the clock field sampled from `seed`.");
  m.def(
      "mass_via_paths",
      [](const Graph& g, const std::vector<double>& masses, double horizon, std::uint64_t seed, Vertex x) {
        return mass_via_paths(g, state_of(g, masses), EventLog::sample(g, horizon, seed), x, horizon);
      },
      py::arg("graph"), py::arg("masses"), py::arg("horizon"), py::arg("seed"), py::arg("vertex"));
  m.def(
      "heat_mean_profile",
      [](const Graph& g, const std::vector<double>& masses, double t) {
        return heat_mean_profile(g, state_of(g, masses), t);
      },
      py::arg("graph"), py::arg("masses"), py::arg("t"));
  m.def(
      "stationary_sample",
      [](const Graph& g, std::size_t samples, std::uint64_t seed) {
        std::vector<std::vector<double>> out;
        for (auto& s : stationary_sample(g, default_burn_in(g), samples, default_gap(g), seed))
          out.push_back(std::move(s.masses));
        return out;
      },
      py::arg("graph"), py::arg("samples"), py::arg("seed"));
  m.def(
      "moment_report",
      [](const Graph& g, const std::string& initial, std::size_t replicas, std::size_t samples, std::uint64_t seed,
         const std::vector<int>& box_sides) {
        const auto reps = replica_moment_runs(g, parse_initial_law(initial), replicas, default_burn_in(g), samples,
                                              default_gap(g), seed, box_sides);
        return report_json(moment_report(reps, g, box_sides));
      },
      py::arg("graph"), py::arg("initial") = "flat", py::arg("replicas") = 8, py::arg("samples") = 200,
      py::arg("seed") = 1, py::arg("box_sides") = std::vector<int>{},
      "JSON moment report (schema meteor-moment-report/1).");
  m.def(
      "verify_prime_solution",
      [](int d) {
        const PrimeCheck c = verify_prime_solution(d);
        py::dict out;
        out["passed"] = c.passed;
        out["zero"] = c.value_zero;
        out["h"] = c.value_h;
        out["other"] = c.value_other;
        return out;
      },
      py::arg("d"));
  m.def(
      "coupling_experiment",
      [](int d, int side, int distance, std::size_t runs, double horizon, std::uint64_t seed) {
        const CouplingSummary c = coupling_experiment(d, side, distance, runs, horizon, seed);
        py::dict out;
        out["runs"] = c.runs;
        out["met"] = c.met;
        out["suffix_equal"] = c.suffix_equal;
        out["window_exceeded"] = c.window_exceeded;
        out["meeting_times"] = c.meeting_times;
        return out;
      },
      py::arg("d"), py::arg("side"), py::arg("distance"), py::arg("runs"), py::arg("horizon"), py::arg("seed"));
  m.def(
      "support_trial",
      [](const Graph& g, double eps1, std::size_t cap, std::uint64_t seed) {
        const SupportTrial t = support_trial(g, eps1, cap, seed);
        py::dict out;
        out["target"] = t.target;
        out["start"] = t.start;
        out["reached"] = t.reach.reached;
        out["steps"] = t.reach.steps;
        out["distance"] = t.reach.distance;
        return out;
      },
      py::arg("graph"), py::arg("eps1") = 0.05, py::arg("cap") = 100'000, py::arg("seed") = 1);
}

#include <cmath>
#include <cstdio>
#include <fstream>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "meteor/experiment.hpp"
#include "unit/helpers.hpp"

using namespace meteor;

TEST_SUITE("experiment") {

TEST_CASE("config echo and hash") {
  ExperimentConfig a;
  a.command = "moments";
  ExperimentConfig b = a;
  CHECK(a.hash() == b.hash());
  CHECK(a.header() == b.header());
  b.seed = 2;
  CHECK(a.hash() != b.hash());
  CHECK(b.header().rfind("# config_hash=", 0) == 0);
  CHECK(b.header().size() == std::string("# config_hash=0123456789abcdef seed=2").size());
  CHECK(b.header().substr(b.header().size() - 7) == " seed=2");
  CHECK(a.to_ini().find("box-sides=\n") != std::string::npos);

  const auto j = nlohmann::json::parse(a.to_json());
  CHECK(j["command"] == "moments");
  CHECK(j["side"] == 100);
  CHECK(j["times"].size() == 4);
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(a.hash()));
  CHECK(j["config_hash"] == hex);
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("graph construction from a config") {
  ExperimentConfig c;
  c.side = 7;
  CHECK(build_graph(c).vertex_count() == 7);
  c.topology = "torus";
  c.dimension = 2;
  CHECK(build_graph(c).vertex_count() == 49);
  c.topology = "window";
  CHECK(build_graph(c).degree(0) == 2);
  c.topology = "lattice";
  CHECK(error_kind([&] { build_graph(c); }) == ErrorKind::invalid_parameter);

  const std::string path = "experiment_edges_test.txt";
  {
    std::ofstream f(path);
    f << "3 3\n0 1\n1 2\n2 0\n";
  }
  c.topology = "edges";
  c.edges_file = path;
  const Graph g = build_graph(c);
  CHECK(g.vertex_count() == 3);
  CHECK(g.degree(1) == 2);
  std::remove(path.c_str());
}

TEST_CASE("oracle comparison") {
  const Graph g = Graph::cycle(8);
  const auto r = oracle_compare(g, initial_state(g, InitialLaw::iid_exponential, 4), EventLog::sample(8, 4.0, 4), 4.0);
  CHECK(r.max_relative_gap < 1e-9);
  CHECK(r.simulated.size() == 8);
}

TEST_CASE("replica sampling does not depend on the thread count") {
  const Graph g = Graph::cycle(20);
  const auto a = sample_replicas(g, InitialLaw::atom, 5, 500, 3, 40, 6, 1);
  const auto b = sample_replicas(g, InitialLaw::atom, 5, 500, 3, 40, 6, 4);
  REQUIRE(a.size() == 5);
  for (std::size_t r = 0; r < a.size(); ++r)
    for (std::size_t i = 0; i < 3; ++i) CHECK(a[r][i].masses == b[r][i].masses);
  CHECK(a[0][0].masses != a[1][0].masses);
}

TEST_CASE("flow variance runner") {
  const std::vector<double> times{0.5, 2.0};
  const FlowVariance f = flow_variance(50, times, 8, 2000, 3, 1);
  REQUIRE(f.shift_averaged.size() == 2);
  CHECK(f.worst_telescoping < 1e-9);
  CHECK(f.shift_averaged[0].value > 0.0);
  CHECK(f.shift_averaged[0].value < f.shift_averaged[1].value);
  const FlowVariance g = flow_variance(50, times, 8, 2000, 3, 3);
  CHECK(g.shift_averaged[1].value == f.shift_averaged[1].value);
}

TEST_CASE("tracer runner") {
  const std::vector<double> times{1.0, 4.0};
  const TracerRun t = tracer_displacements(40, times, 5, 6, 2000, 2, 1);
  CHECK(t.order_preserved);
  REQUIRE(t.displacement.size() == 2);
  CHECK(t.displacement[0].size() == 30);
  CHECK(t.moment_15.size() == 2);
  for (double x : t.displacement[1]) CHECK(x == std::round(x));
}

TEST_CASE("coupling runner") {
  const CouplingSummary s = coupling_experiment(1, 256, 4, 40, 2000.0, 5);
  CHECK(s.runs == 40);
  CHECK(s.suffix_equal == 40);
  CHECK(s.met == s.meeting_times.size());
  CHECK(s.met >= 30);
  for (double t : s.meeting_times) CHECK(t <= 2000.0);
  CHECK(error_kind([] { coupling_experiment(1, 64, 0, 1, 1.0, 1); }) == ErrorKind::invalid_parameter);
}

TEST_CASE("support targets") {
  const Graph t = Graph::torus(3, 2);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto a = random_U_star(t, 0.125, seed);
    CHECK(in_U_star(a, t));
    for (double x : a) CHECK((x == 0.0 || x >= 0.125));
    CHECK(in_U(random_U(t, seed), t));
  }
}

}  // TEST_SUITE

#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "doctest.h"
#include "meteor/experiment.hpp"
#include "meteor/process.hpp"
#include "meteor/support.hpp"
#include "unit/helpers.hpp"

using namespace meteor;

namespace {

Graph path3() {
  const std::vector<std::pair<Vertex, Vertex>> e{{0, 1}, {1, 2}};
  return Graph::from_edges(3, e);
}

std::vector<double> random_vector(int k, Stream& s, double zero_prob) {
  std::vector<double> a(static_cast<std::size_t>(k));
  for (double& x : a) x = s.uniform() < zero_prob ? 0.0 : s.exponential();
  return a;
}

double total(const std::vector<double>& a) { return std::accumulate(a.begin(), a.end(), 0.0); }

}  // namespace

TEST_SUITE("support") {

TEST_CASE("T operator") {
  const Graph p = path3();
  const std::vector<double> ones{1, 1, 1};
  CHECK(op_T(ones, 1, p) == std::vector<double>{1.5, 0, 1.5});
  const std::vector<double> a{2, 0, 1};
  CHECK(op_T(a, 1, p) == a);
}

TEST_CASE("T operator equals the meteor hit bit for bit") {
  Stream s(1, StreamDomain::experiment, 0);
  for (int i = 0; i < 1000; ++i) {
    const Graph g = i % 3 == 0 ? Graph::torus(4, 2) : (i % 3 == 1 ? Graph::cycle(7) : Graph::window(6, 1));
    const auto a = random_vector(g.vertex_count(), s, 0.2);
    const auto y = static_cast<Vertex>(s.below(static_cast<std::uint64_t>(g.vertex_count())));
    CHECK(op_T(a, y, g) == hit(MassState{a, 0.0}, y, g).masses);
  }
}

TEST_CASE("R operator") {
  const Graph p = path3();
  const std::vector<double> a{1.5, 0, 1.5};
  CHECK(op_R(a, 1, p) == std::vector<double>{0, 3, 0});
  const std::vector<double> b{0, 0, 2};
  CHECK(op_R(b, 1, p) == b);
}

TEST_CASE("R then T is the identity on U") {
  Stream s(2, StreamDomain::experiment, 0);
  int checked = 0;
  for (int i = 0; i < 2000; ++i) {
    const Graph g = i % 2 ? Graph::cycle(6) : Graph::torus(3, 2);
    auto a = random_vector(g.vertex_count(), s, 0.0);
    const auto y = static_cast<Vertex>(s.below(static_cast<std::uint64_t>(g.vertex_count())));
    a[static_cast<std::size_t>(y)] = 0.0;
    const double scale = g.vertex_count() / total(a);
    for (double& x : a) x *= scale;
    REQUIRE(in_U(a, g));
    const auto r = op_R(a, y, g);
    CHECK(in_U(r, g));
    CHECK(std::abs(total(r) - total(a)) < 1e-12 * g.vertex_count());
    CHECK(l1_distance(op_T(r, y, g), a) < 1e-12);
    ++checked;
  }
  CHECK(checked == 2000);
}

TEST_CASE("T is an L1 contraction") {
  Stream s(3, StreamDomain::experiment, 0);
  const Graph gs[] = {Graph::cycle(5), Graph::torus(3, 2), Graph::window(4, 2)};
  for (int i = 0; i < 10000; ++i) {
    const Graph& g = gs[i % 3];
    const auto a = random_vector(g.vertex_count(), s, 0.3);
    const auto b = random_vector(g.vertex_count(), s, 0.3);
    const auto x = static_cast<Vertex>(s.below(static_cast<std::uint64_t>(g.vertex_count())));
    const auto ta = op_T(a, x, g), tb = op_T(b, x, g);
    CHECK(l1_distance(ta, tb) <= l1_distance(a, b) + 1e-12);
    CHECK(std::abs(total(ta) - total(a)) <= 1e-12 * std::max(1.0, total(a)));
  }
}

TEST_CASE("U and U* membership") {
  const Graph c = Graph::cycle(3);
  CHECK(in_U(std::vector<double>{0, 1.5, 1.5}, c));
  CHECK(in_U_star(std::vector<double>{0, 1.5, 1.5}, c));
  CHECK_FALSE(in_U(std::vector<double>{1, 1, 1}, c));
  CHECK_FALSE(in_U(std::vector<double>{0, 1, 1}, c));
  const Graph c4 = Graph::cycle(4);
  CHECK(in_U(std::vector<double>{0, 0, 2, 2}, c4));
  CHECK_FALSE(in_U_star(std::vector<double>{0, 0, 2, 2}, c4));
}

TEST_CASE("reverse sequence on C_3") {
  const Graph c = Graph::cycle(3);
  const std::vector<double> a{0, 1.5, 1.5};
  const auto steps = reverse_sequence(c, a, 0.1, 5);
  REQUIRE(steps.size() == 5);
  ReverseSequence seq(c, a, 0.1);
  for (std::size_t n = 1; n <= 5; ++n) {
    seq.extend_to(n);
    CHECK(in_U(seq.endpoint(), c));
  }
  CHECK(steps[0].x == 0);
}

TEST_CASE("reverse sequence visits every vertex and keeps its budgets") {
  const Graph c5 = Graph::cycle(5);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto a = random_U_star(c5, 0.25, seed);
    ReverseSequence seq(c5, a, 0.1);
    seq.extend_to(250);
    std::set<Vertex> seen;
    for (const auto& st : seq.steps()) {
      seen.insert(st.x);
      CHECK(st.zeros >= 1);
      if (st.zeros > 1) {
        // delta_j < eps_j / 2^j, compared in log2 because both leave double range
        const double j = static_cast<double>(&st - seq.steps().data()) + 1.0;
        CHECK(st.log2_delta < st.log2_epsilon - j);
      }
    }
    CHECK(seen.size() == 5);
    for (std::size_t j = 1; j < seq.size(); ++j) CHECK(seq.steps()[j].log2_epsilon < seq.steps()[j - 1].log2_epsilon);
  }
}

TEST_CASE("reverse sequence preconditions") {
  const Graph c = Graph::cycle(4);
  CHECK(error_kind([&] { ReverseSequence(c, std::vector<double>{0, 0, 2, 2}, 0.1); }) == ErrorKind::invalid_target);
  CHECK(error_kind([&] { ReverseSequence(c, std::vector<double>{1, 1, 1, 1}, 0.1); }) == ErrorKind::invalid_target);
  CHECK(error_kind([&] { ReverseSequence(c, std::vector<double>{0, 1, 1, 2}, 0.6); }) ==
        ErrorKind::invalid_parameter);
  CHECK(error_kind([&] { ReverseSequence(c, std::vector<double>{0, 1, 1, 2}, 0.0); }) ==
        ErrorKind::invalid_parameter);
}

TEST_CASE("forward replay") {
  const Graph c5 = Graph::cycle(5);
  const std::vector<double> c{0, 1, 2, 1, 1};
  CHECK(forward_replay(c5, c, std::vector<Vertex>{}) == c);
  // replay runs the sequence backwards: x_n first
  const std::vector<Vertex> xs{1, 3};
  CHECK(forward_replay(c5, c, xs) == op_T(op_T(c, 3, c5), 1, c5));

  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto a = random_U_star(c5, 0.2, seed);
    ReverseSequence seq(c5, a, 0.05);
    for (std::size_t n : {1u, 5u, 20u, 60u}) {
      seq.extend_to(n);
      // started from the reverse endpoint the replay lands within eps1 of a
      CHECK(l1_distance(forward_replay(c5, seq.endpoint(), seq.vertices()), a) <= 0.05);
    }
  }
}

TEST_CASE("any start in U reaches the target") {
  const Graph c5 = Graph::cycle(5);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const SupportTrial t = support_trial(c5, 0.05, 100'000, seed);
    CHECK(in_U_star(t.target, c5));
    CHECK(in_U(t.start, c5));
    CHECK(t.reach.reached);
    CHECK(t.reach.distance <= 0.1);
    CHECK(t.replay_error <= 0.05);
  }
}

}  // TEST_SUITE

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "meteor/error.hpp"
#include "meteor/graph.hpp"

namespace meteor {

// Double mantissa with a 64-bit exponent. The perturbation budgets of the
// reverse construction shrink like 2^{-j^2/2} and leave the double range
// after a few dozen steps.
using WideReal = boost::multiprecision::number<
    boost::multiprecision::cpp_bin_float<53, boost::multiprecision::digit_base_2, void, std::int64_t,
                                         -(std::int64_t{1} << 60), (std::int64_t{1} << 60)>,
    boost::multiprecision::et_off>;

// Meteor hit at y as a map on mass vectors.
std::vector<double> op_T(std::span<const double> a, Vertex y, const Graph& g);
// Inverse of op_T at y: pulls the smallest neighbour mass m back from every
// neighbour, so y gains d_y m.
std::vector<double> op_R(std::span<const double> a, Vertex y, const Graph& g);

double l1_distance(std::span<const double> a, std::span<const double> b);

// Membership in U (sum k, nonnegative, some zero) and U* (additionally no
// edge with both ends zero). `tolerance` applies to the sum.
bool in_U(std::span<const double> a, const Graph& g, double tolerance = 1e-9);
bool in_U_star(std::span<const double> a, const Graph& g, double tolerance = 1e-9);

struct ReverseStep {
  Vertex x = 0;          // vertex pulled back by op_R at this step
  Vertex donor = -1;     // vertex paying for the perturbation, -1 if none needed
  int zeros = 0;         // zero count of a^j before perturbing
  double delta = 0.0;    // delta_j; unused when a^j has a single zero
  double epsilon = 0.0;  // eps_j
  double log2_delta = 0.0;
  double log2_epsilon = 0.0;
};

// Incremental reverse construction from a target a in U*.
//
// At step j the zeros of a^j other than the chosen one receive delta_j/2^r,
// paid by the largest coordinate; the chosen zero is the one that has been
// zero for the longest run of consecutive steps (lowest index on ties), and
// op_R at it yields a^{j+1}. delta_j = min(eps_j/2^{j+1}, max/2) and
// eps_{j+1} = min(eps_j, a^{j+1}_min)/4.
class ReverseSequence {
 public:
  ReverseSequence(const Graph& g, std::span<const double> target, double eps1);

  void extend_to(std::size_t n);
  std::size_t size() const noexcept { return steps_.size(); }

  const std::vector<ReverseStep>& steps() const noexcept { return steps_; }
  std::vector<Vertex> vertices() const;
  // a^{size()+1}, rounded to double.
  std::vector<double> endpoint() const;
  const std::vector<double>& target() const noexcept { return target_; }
  double eps1() const noexcept { return eps1_; }
  const Graph& graph() const noexcept { return *g_; }

 private:
  void advance();

  const Graph* g_;
  std::vector<double> target_;
  double eps1_;
  std::vector<WideReal> a_;
  WideReal eps_;
  std::vector<std::int64_t> zero_run_;
  std::vector<ReverseStep> steps_;
};

inline std::vector<ReverseStep> reverse_sequence(const Graph& g, std::span<const double> a,
                                                 double eps1, std::size_t n) {
  ReverseSequence seq(g, a, eps1);
  seq.extend_to(n);
  return seq.steps();
}

// c^n = c; c^j = op_T(c^{j+1}, x_j) for j = n-1 .. 1 where xseq = x_1..x_{n-1}.
std::vector<double> forward_replay(const Graph& g, std::span<const double> c, std::span<const Vertex> xseq);

struct ReachResult {
  bool reached = false;
  std::size_t steps = 0;     // length of the sequence that achieved it
  double distance = 0.0;     // |c^1 - a|_1 at that length (or at the cap)
};

// Doubles the sequence length from `initial` until |c^1 - a|_1 <= 2 eps1 or
// the cap is passed.
ReachResult reach_target(ReverseSequence& seq, std::span<const double> c, std::size_t initial = 16,
                         std::size_t cap = 100'000);

}  // namespace meteor

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "meteor/error.hpp"
#include "meteor/events.hpp"
#include "meteor/graph.hpp"
#include "meteor/process.hpp"

namespace meteor {

enum class InitialLaw {
  flat,             // M = 1 everywhere
  atom,             // all mass k at vertex 0
  iid_exponential,  // i.i.d. Exp(1)
  zero_or_two,      // whole field 0 or whole field 2, probability 1/2 each
};

const char* to_string(InitialLaw law) noexcept;
InitialLaw parse_initial_law(const std::string& name);
MassState initial_state(const Graph& g, InitialLaw law, std::uint64_t seed);

// Evolves state0 on the streaming clock, skips `burn_in_events` hits, then
// keeps one state every `gap_events` hits.
std::vector<MassState> stationary_sample(const Graph& g, const MassState& state0,
                                         std::uint64_t burn_in_events, std::size_t n_samples,
                                         std::uint64_t gap_events, std::uint64_t seed);
std::vector<MassState> stationary_sample(const Graph& g, std::uint64_t burn_in_events,
                                         std::size_t n_samples, std::uint64_t gap_events,
                                         std::uint64_t seed);

inline std::uint64_t default_burn_in(const Graph& g) { return 200ull * static_cast<std::uint64_t>(g.vertex_count()); }
inline std::uint64_t default_gap(const Graph& g) { return 5ull * static_cast<std::uint64_t>(g.vertex_count()); }

// Mean and 95% half-width from independent replica values (Student t).
struct Estimate {
  double value = 0.0;
  double ci = 0.0;
  std::size_t count = 0;
};
Estimate replica_estimate(std::span<const double> values);
double student_t_975(std::size_t dof);

// Per-replica summary of a block of samples on a cycle or torus. Every field
// is a within-replica average; centred quantities use the replica mean.
struct ReplicaMoments {
  double mean = 0.0;            // shift-averaged E M
  double second = 0.0;          // shift-averaged E M^2
  double variance = 0.0;        // second - mean^2
  double cov_neighbor = 0.0;    // E M^x M^{x+e_i} - mean^2
  double cov_far = 0.0;         // offset 2 e_1
  double third = 0.0;           // shift-averaged E M^3
  std::vector<double> box_variance;  // one per box side
  double plain_mean = 0.0;      // vertex 0 only
  double plain_second = 0.0;
  std::size_t samples = 0;
};

ReplicaMoments replica_moments(std::span<const MassState> samples, const Graph& g,
                               std::span<const int> box_sides = {}, double scale = 1.0);

// Var of the sum over every translate of {0..n-1}^d, for one state, averaged
// over translates (uncentred second moment of the box sum).
double box_sum_second_moment(const MassState& s, const Graph& g, int n);

struct Quantity {
  std::string name;
  double estimate = 0.0;
  double ci = 0.0;
  double target = std::numeric_limits<double>::quiet_NaN();  // NaN: reported only
  double tolerance = 0.0;
  bool relative = false;
  bool pass = true;
};

struct Tolerances {
  double mean = 0.02;
  double variance = 0.1;
  double cov_neighbor = 0.05;
  double cov_far = 0.05;
  double box_relative = 0.15;
};

struct MomentReport {
  std::string graph;
  int dimension = 0;
  std::size_t replicas = 0;
  std::size_t samples_per_replica = 0;
  std::uint64_t burn_in_events = 0;
  std::uint64_t gap_events = 0;
  std::vector<Quantity> quantities;
  std::vector<ReplicaMoments> per_replica;

  const Quantity& at(const std::string& name) const;
  bool passed() const;
};

// Targets: mean 1, variance 1, neighbour covariance -1/(2d), covariance at
// offset 2e_1 zero, box variance n^{d-1}. Also reports the pooled variance
// (replica means not removed), the third moment and plain vertex-0
// estimates. Needs at least 2 replicas and 100 samples in total.
MomentReport moment_report(std::span<const ReplicaMoments> replicas, const Graph& g,
                           std::span<const int> box_sides = {}, const Tolerances& tol = {});
MomentReport moment_report(std::span<const std::vector<MassState>> replicas, const Graph& g,
                           std::span<const int> box_sides = {}, const Tolerances& tol = {});

void write_report_csv(std::ostream& out, const MomentReport& report);
std::string report_json(const MomentReport& report, const std::string& config_echo = "{}");

struct TailEstimate {
  double estimate = 0.0;
  double lower = 0.0;  // exact binomial (Clopper-Pearson) 95%
  double upper = 0.0;
  std::size_t exceed = 0;
  std::size_t total = 0;
};

// P(|X| > m) from samples.
TailEstimate tail_estimate(std::span<const double> displacements, double m);

struct ScalingCheck {
  double c = 1.0;
  double mean = 0.0, mean_scaled = 0.0, mean_ci = 0.0;
  double variance = 0.0, variance_scaled = 0.0, variance_ci = 0.0;
  bool pass = false;
};

// Moments of c M against c E M and c^2 Var M, within the CI of the scaled estimate.
ScalingCheck scaling_test(std::span<const std::vector<MassState>> replicas, const Graph& g, double c);

// |a - b| <= z * sqrt(ci_a^2 + ci_b^2) / 1.96 with a Bonferroni z for `tests` comparisons.
bool estimates_agree(const Quantity& a, const Quantity& b, int tests = 1);

// Runs fn(replica_index) for 0..count-1 on up to `threads` workers and
// returns results in replica order.
template <class Result>
std::vector<Result> run_replicas(std::size_t count, const std::function<Result(std::size_t)>& fn,
                                 unsigned threads = 0) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  std::vector<Result> out(count);
  if (threads == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += threads) out[i] = fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

inline std::uint64_t replica_seed(std::uint64_t base, std::size_t replica) {
  return derive_key(base, StreamDomain::replica, replica);
}

}  // namespace meteor

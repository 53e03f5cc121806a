#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "meteor/events.hpp"
#include "meteor/flowpaths.hpp"
#include "meteor/graph.hpp"
#include "meteor/process.hpp"
#include "meteor/stats.hpp"
#include "meteor/support.hpp"
#include "meteor/wimps.hpp"

namespace meteor {

// Flat key/value description of one run; to_ini() is echoed into outputs
// and hashed for the output header.
struct ExperimentConfig {
  std::string command;
  std::string topology = "cycle";  // cycle | torus | window | edges
  int side = 100;
  int dimension = 1;
  std::string edges_file;
  std::string initial = "flat";
  double horizon = 10.0;
  std::uint64_t seed = 1;
  std::size_t replicas = 8;
  std::size_t samples = 200;
  std::uint64_t burn_in = 0;  // events; 0 selects 200 |V|
  std::uint64_t gap = 0;      // events; 0 selects 5 |V|
  std::vector<double> times{1, 5, 25, 100};
  std::vector<double> tail_m{6, 8, 12};
  std::vector<int> box_sides;
  double eps = 0.05;
  std::size_t step_cap = 100'000;
  int walks = 3;
  int labels = 10;
  int distance = 2;
  int d_max = 8;
  unsigned threads = 0;
  std::string output_dir = ".";

  std::string to_ini() const;
  std::uint64_t hash() const;
  // "# config_hash=<16 hex> seed=<seed>"
  std::string header() const;
  // JSON object with every field plus config_hash.
  std::string to_json() const;
};

Graph build_graph(const ExperimentConfig& config);
std::uint64_t fnv1a64(const std::string& text);

// simulate vs the path recursion at every vertex; largest relative gap
// |a - b| / max(1, |a|, |b|).
struct OracleComparison {
  double max_relative_gap = 0.0;
  Vertex worst_vertex = 0;
  std::vector<double> simulated, oracle;
};
OracleComparison oracle_compare(const Graph& g, const MassState& state0, const EventLog& log, double T,
                                std::size_t budget = kDefaultPathBudget);

// Independent replicas of stationary_sample, replica r seeded by replica_seed(seed, r).
std::vector<std::vector<MassState>> sample_replicas(const Graph& g, InitialLaw law, std::size_t replicas,
                                                    std::uint64_t burn_in, std::size_t samples,
                                                    std::uint64_t gap, std::uint64_t seed,
                                                    unsigned threads = 0);
std::vector<ReplicaMoments> replica_moment_runs(const Graph& g, InitialLaw law, std::size_t replicas,
                                                std::uint64_t burn_in, std::size_t samples,
                                                std::uint64_t gap, std::uint64_t seed,
                                                std::span<const int> box_sides, unsigned threads = 0);

// Stationary flow on a cycle: after `burn_in` events from the flat state,
// F over [0, t] is recorded for each t in `times`. Per replica the shift
// average of (F^x_t)^2 over all edges estimates Var F^0_t (the edge average
// of F is exactly zero on a cycle).
struct FlowVariance {
  std::vector<double> times;
  std::vector<Estimate> shift_averaged;
  std::vector<Estimate> plain;  // (F^0_t)^2 only
  double worst_telescoping = 0.0;
};
FlowVariance flow_variance(int n, std::span<const double> times, std::size_t replicas, std::uint64_t burn_in,
                           std::uint64_t seed, unsigned threads = 0);

// Signed tracer displacement H_t - H_0 for `labels` labels spread evenly over
// the mass of a stationary cycle.
struct TracerRun {
  std::vector<double> times;
  std::vector<std::vector<double>> displacement;  // [time][replica * labels + label]
  std::vector<Estimate> moment_15;                // E |H_t - H_0|^{1.5}, replica batches
  bool order_preserved = true;
};
TracerRun tracer_displacements(int n, std::span<const double> times, int labels, std::size_t replicas,
                               std::uint64_t burn_in, std::uint64_t seed, unsigned threads = 0);

struct CouplingSummary {
  int dimension = 0;
  int side = 0;
  std::size_t runs = 0;
  std::size_t met = 0;
  std::size_t suffix_equal = 0;
  std::size_t window_exceeded = 0;
  double mean_meeting_time = 0.0;
  double mean_stages = 0.0;
  std::int64_t max_displacement = 0;
  std::vector<double> meeting_times;  // runs that met, in run order
  double met_fraction() const { return runs ? static_cast<double>(met) / runs : 0.0; }
};
// Runs r = 0..runs-1 start at the centre and at an offset of L1 length
// 1 + (r mod max_distance), on a lazily sampled clock field.
CouplingSummary coupling_experiment(int d, int side, int max_distance, std::size_t runs, double t_end,
                                    std::uint64_t seed);

struct SupportTrial {
  std::vector<double> target, start;
  ReachResult reach;
  double replay_error = 0.0;  // |b^1 - a|_1 from the reverse endpoint
  std::size_t target_zeros = 0;
};
// Random target in U* (positive coordinates >= 2.5 eps1) and random start in U.
SupportTrial support_trial(const Graph& g, double eps1, std::size_t cap, std::uint64_t seed);
std::vector<double> random_U_star(const Graph& g, double min_positive, std::uint64_t seed);
std::vector<double> random_U(const Graph& g, std::uint64_t seed);

}  // namespace meteor

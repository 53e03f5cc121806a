#pragma once

#include <cstdint>
#include <iosfwd>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "meteor/error.hpp"
#include "meteor/events.hpp"
#include "meteor/graph.hpp"

namespace meteor {

// Mass field M_t: one nonnegative double per vertex.
struct MassState {
  std::vector<double> masses;
  double time = 0.0;

  double total() const noexcept { return std::accumulate(masses.begin(), masses.end(), 0.0); }
  std::size_t size() const noexcept { return masses.size(); }
  double operator[](Vertex v) const noexcept { return masses[static_cast<std::size_t>(v)]; }
};

MassState flat_state(const Graph& g, double level = 1.0);
MassState atom_state(const Graph& g, Vertex at, double mass);
void validate_state(const Graph& g, const MassState& s);

// The meteor jump at v, in place: every neighbour gains M^v/d_v and v is emptied.
inline void apply_hit(std::span<double> masses, const Graph& g, Vertex v) noexcept {
  const double m = masses[static_cast<std::size_t>(v)];
  if (m == 0.0) return;
  const double share = m / g.degree(v);
  for (Vertex x : g.neighbors(v)) masses[static_cast<std::size_t>(x)] += share;
  masses[static_cast<std::size_t>(v)] = 0.0;
}

MassState hit(const MassState& state, Vertex v, const Graph& g);

// Recomputes the total every `period` events and fails with invalid-state if
// it drifted more than 1e-9 relative to the initial total.
class DriftMonitor {
 public:
  static constexpr std::uint64_t kDefaultPeriod = 1'000'000;
  static constexpr double kTolerance = 1e-9;

  explicit DriftMonitor(double initial_total, std::uint64_t period = kDefaultPeriod)
      : initial_(initial_total), period_(period) {}

  void tick(std::span<const double> masses) {
    if (++count_ % period_ == 0) check(masses);
  }
  void check(std::span<const double> masses) const;
  double relative_drift(std::span<const double> masses) const;

 private:
  double initial_;
  std::uint64_t period_;
  std::uint64_t count_ = 0;
};

// Applies every hit with time <= t_end in merged order.
MassState simulate(const Graph& g, const MassState& state0, const EventLog& log, double t_end);

// Same as simulate, calling observer(event, pre_hit_mass, masses_after) after each hit.
template <class Observer>
MassState simulate_observed(const Graph& g, const MassState& state0, const EventLog& log,
                            double t_end, Observer&& observer) {
  require(t_end <= log.horizon(), ErrorKind::invalid_parameter, "t_end beyond the log horizon");
  validate_state(g, state0);
  MassState s = state0;
  DriftMonitor drift(s.total());
  for (const Event& e : merged_events(log)) {
    if (e.time > t_end) break;
    const double pre = s.masses[static_cast<std::size_t>(e.vertex)];
    apply_hit(s.masses, g, e.vertex);
    drift.tick(s.masses);
    observer(e, pre, static_cast<const MassState&>(s));
  }
  s.time = t_end;
  return s;
}

inline constexpr std::size_t kDefaultPathBudget = 10'000'000;

// M^x_T as a sum over acceptable paths ending at (x, T), evaluated by
// memoized backward recursion over (vertex, hit index). Each memo entry is
// the mass a path-sum delivers to a vertex just before one of its hits.
double mass_via_paths(const Graph& g, const MassState& state0, const EventLog& log, Vertex x,
                      double T, std::size_t budget = kDefaultPathBudget);

// True iff no walker path driven by the log that sits on the boundary layer
// at any time in [0, T] can reach the observation set by time T.
bool boundary_cone_clear(const Graph& g, const EventLog& log, std::span<const Vertex> observation,
                         double T);
bool boundary_cone_clear(const Graph& g, const EventLog& log, std::span<const Vertex> observation,
                         std::span<const Vertex> boundary, double T);

struct ZeroSetReport {
  bool passed = true;
  std::vector<Vertex> checked;
  std::vector<Vertex> skipped;     // hypothesis (positive neighbours at time 0) fails
  std::vector<Vertex> violations;  // zero status disagrees with the hit-time rule
};

// Checks, at time t, that M^v_t = 0 exactly when v was hit last in its closed
// neighbourhood, or v started empty and no neighbour has been hit.
ZeroSetReport zero_set_check(const Graph& g, const MassState& state0, const EventLog& log, double t);

// Ordered adjacent pairs (x, v) with M^x + M^v = 0.
std::int64_t zero_pair_count(const MassState& state, const Graph& g);

// E M^x_t given M_0: the continuous-time random walk kernel applied to the
// initial profile, by uniformization to absolute tolerance 1e-10.
double heat_mean_oracle(const Graph& g, const MassState& state0, Vertex x, double t);
std::vector<double> heat_mean_profile(const Graph& g, const MassState& state0, double t);

void write_state_csv(std::ostream& out, const MassState& s);
MassState read_state_csv(std::istream& in);
// Binary snapshot: magic "METEORMS", u32 version, u32 n, f64 time, n x f64.
void write_state_binary(std::ostream& out, const MassState& s);
MassState read_state_binary(std::istream& in);

}  // namespace meteor

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "meteor/error.hpp"
#include "meteor/events.hpp"
#include "meteor/graph.hpp"
#include "meteor/process.hpp"
#include "meteor/rng.hpp"

namespace meteor {

// Piecewise-constant path: vertices[0] from time 0, vertices[i] from times[i-1].
struct Trajectory {
  std::vector<double> jump_times;
  std::vector<Vertex> vertices;

  Vertex at(double t) const;
  Vertex final_vertex() const { return vertices.back(); }
};

struct WimpRun {
  std::vector<Vertex> start;
  std::vector<Vertex> positions;
  std::vector<Trajectory> paths;  // filled only when recording
};

// Independent starts with P(Z = x) = M^x / total; walk i uses stream (seed, wimp_start, i).
std::vector<Vertex> sample_wimp_starts(const MassState& state0, int walks, std::uint64_t seed);

// Walk i standing at v since time s jumps at the first hit of v after s, to
// the neighbour keyed by (seed, walk i, jump count). Walks never read each
// other, so co-located walks share jump times automatically and pick their
// directions independently.
template <class Clock>
Trajectory advance_walk(const Graph& g, Clock& clock, Vertex start, int walk, double t,
                        std::uint64_t seed, bool record) {
  const Stream dir(seed, StreamDomain::wimp_direction, static_cast<std::uint64_t>(walk));
  Trajectory tr;
  tr.vertices.push_back(start);
  Vertex v = start;
  double s = 0.0;
  std::uint64_t jumps = 0;
  for (double next = clock.next_hit_after(v, s); next <= t; next = clock.next_hit_after(v, s)) {
    const auto nb = g.neighbors(v);
    v = nb[keyed_below(dir, jumps++, nb.size())];
    s = next;
    if (record) {
      tr.jump_times.push_back(s);
      tr.vertices.push_back(v);
    }
  }
  if (!record) tr.vertices.back() = v;
  return tr;
}

WimpRun run_wimps(const Graph& g, const MassState& state0, const EventLog& log, int walks, double t,
                  std::uint64_t seed, bool record = false);
WimpRun run_wimps_from(const Graph& g, std::span<const Vertex> starts, const EventLog& log, double t,
                       std::uint64_t seed, bool record = false);

// True iff every jump of `tr` happens at a hit of its pre-jump vertex and
// lands on a neighbour, with no hit of the occupied vertex skipped.
bool follows_clock(const Graph& g, const EventLog& log, const Trajectory& tr, double t_end);

// Rows "time,walk,vertex"; the first row of each walk is its start at time 0.
void write_trajectories_csv(std::ostream& out, const WimpRun& run);

struct EquationCheck {
  std::string name;
  std::string lhs;  // exact rationals, "p/q"
  std::string rhs;
  bool holds = false;
};

struct PrimeCheck {
  int dimension = 0;
  bool passed = false;
  std::string value_zero, value_h, value_other;
  std::vector<EquationCheck> equations;
};

// Exact check of the five balance identities of the candidate equilibrium
// for the three-walk skeleton: 1 on coincidences, (6d-3)/(8d) at gap class h,
// 3/4 elsewhere.
PrimeCheck verify_prime_solution(int d);

struct ThirdMomentCheck {
  double lhs = 0.0;       // shift-averaged E (M^x)^3
  double rhs = 0.0;       // k^2 P(Z1 = Z2 = Z3)
  double gap = 0.0;       // lhs - rhs
  double gap_ci = 0.0;    // 95% half-width of the paired gap
  double lhs_ci = 0.0;
  double rhs_ci = 0.0;
  double pooled_ci = 0.0; // hypot(lhs_ci, rhs_ci); within_ci compares |gap| to this
  std::size_t samples = 0;
  bool within_ci = false;
};

// rhs is estimated by drawing Z1 ~ M/k `draws` times per sample and using the
// exact conditional probability (M^{Z1}/k)^2 that Z2 and Z3 join it; draws = 0
// sums that conditional probability over Z1 exactly. CIs are batch means over
// `batches` contiguous groups of samples.
ThirdMomentCheck third_moment_crosscheck(std::span<const MassState> samples, std::uint64_t seed,
                                         int draws = 1, int batches = 20);

struct CouplingRun {
  Vertex z0 = 0, z0_tilde = 0;
  std::optional<double> meeting_time;
  int stages = 1;                        // 1 + number of restarts
  std::int64_t displacement_max[2] = {0, 0};  // L1, unwrapped
  bool window_exceeded = false;          // some coordinate left the window before meeting
  bool suffix_equal = true;              // trajectories coincide after the meeting
  Trajectory path, path_tilde;           // filled only when recording
};

struct CouplingOptions {
  bool record = false;
};

// Reflection coupling per coordinate driven by one shared clock field on a
// torus used as a window of Z^d. Both walks read the same skeleton of steps
// (coordinate, sign) drawn from the coupling stream of the current stage:
// the second walk mirrors a step in coordinate i while the skeleton gap in i
// exceeds 1 and copies it afterwards. Each walk consumes skeleton steps at
// the hits of its own vertex. Once every coordinate has switched to copying
// and both walks are past that index without meeting, a new stage with a
// fresh skeleton starts from the current positions. After meeting the second
// walk copies the first.
template <class Clock>
CouplingRun mirror_couple(const Graph& g, Vertex z0, Vertex z0_tilde, Clock& clock, double t_end,
                          std::uint64_t seed, CouplingOptions options = {});

}  // namespace meteor

#include "meteor/detail/coupling_impl.hpp"

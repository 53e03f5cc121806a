#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "meteor/error.hpp"
#include "meteor/events.hpp"
#include "meteor/graph.hpp"
#include "meteor/process.hpp"

namespace meteor {

// Net mass carried across each edge (x, x+1) of a cycle or a line window.
// On a cycle edge n-1 joins n-1 and 0; on a line there are n-1 edges.
class FlowLedger {
 public:
  explicit FlowLedger(const Graph& g);

  // A hit of x that carried `pre_mass`: the share sent right crosses edge x
  // positively, the share sent left crosses edge x-1 negatively.
  void record(Vertex x, double pre_mass) noexcept {
    const double share = pre_mass / degree_[static_cast<std::size_t>(x)];
    if (x + 1 < n_ || periodic_) flow_[static_cast<std::size_t>(x)] += share;
    if (x > 0) flow_[static_cast<std::size_t>(x - 1)] -= share;
    else if (periodic_) flow_[static_cast<std::size_t>(n_ - 1)] -= share;
  }

  // F at edge x; cycle indices wrap, so at(-1) is edge n-1.
  double at(std::int64_t x) const;
  std::span<const double> edges() const noexcept { return flow_; }
  bool periodic() const noexcept { return periodic_; }
  double time = 0.0;

 private:
  int n_;
  bool periodic_;
  std::vector<int> degree_;
  std::vector<double> flow_;
};

struct FlowRun {
  FlowLedger ledger;
  MassState state;
};

FlowRun accumulate_flow(const Graph& g, const MassState& state0, const EventLog& log, double t_end);

// F^0_t - F^x_t - (sum_{1<=y<=x} M^y_t - sum_{1<=y<=x} M^y_0), largest absolute
// value over x in 1..n-1.
double telescoping_residual(const FlowLedger& ledger, const MassState& state0, const MassState& state_t);

// Cumulative mass profile Gamma on a cycle (through its universal cover,
// Gamma^{k+n} = Gamma^k + total) or a line window, plus tracer labels.
//
// Index k is a vertex index of the cover; vertex k carries
// M^k = Gamma^{k+1} - Gamma^k. Gamma^origin = 0 at initialization.
class PathRep {
 public:
  static PathRep init(const Graph& g, const MassState& state0, Vertex origin = 0);

  double gamma(std::int64_t k) const;
  double mass(Vertex v) const;
  double total() const noexcept { return total_; }
  bool periodic() const noexcept { return periodic_; }
  int size() const noexcept { return n_; }

  // Hit of vertex v: Gamma^v and Gamma^{v+1} both move to their midpoint
  // (on a line endpoint the lone neighbour gets everything). Tracked labels
  // sitting at v move to v-1 or v+1 by which side of the midpoint they are on.
  void step(Vertex v);

  // The unique k with Gamma^k <= y < Gamma^{k+1}. Lines throw
  // window-exhausted outside [Gamma^0, Gamma^n).
  std::int64_t locate(double y) const;

  // Tracked labels keep an unwrapped position updated by step().
  std::size_t track(double y);
  std::int64_t position(std::size_t label) const { return labels_[label].position; }
  double label(std::size_t label) const { return labels_[label].y; }
  std::size_t label_count() const noexcept { return labels_.size(); }

 private:
  struct Label {
    double y;
    std::int64_t position;
  };
  PathRep() = default;

  int n_ = 0;
  bool periodic_ = false;
  double total_ = 0.0;
  std::vector<double> g_;  // Gamma^0 .. Gamma^n of the base period
  std::vector<Label> labels_;
};

inline PathRep gamma_init(const Graph& g, const MassState& state0, Vertex origin = 0) {
  return PathRep::init(g, state0, origin);
}
inline void gamma_step(PathRep& rep, Vertex v) { rep.step(v); }
inline std::int64_t locate_tracer(const PathRep& rep, double y) { return rep.locate(y); }

// Largest |H_t - H_0| (in vertices, unwrapped) of the tracer with label
// theta along the cyclic dynamics from state0 up to t_end.
std::int64_t winding_check(const Graph& g, const MassState& state0, double theta, const EventLog& log,
                           double t_end);
// Same on the streaming clock for `events` hits, without materializing a log.
std::int64_t winding_check_streaming(const Graph& g, const MassState& state0, double theta,
                                     std::uint64_t seed, std::uint64_t events);

// CSV dumps: "time,label,position" rows and "edge,flow" rows.
void write_flow_csv(std::ostream& out, const FlowLedger& ledger);

}  // namespace meteor

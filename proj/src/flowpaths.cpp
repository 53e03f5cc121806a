#include "meteor/flowpaths.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace meteor {

namespace {

void require_one_dimensional(const Graph& g) {
  require(g.is_one_dimensional(), ErrorKind::unsupported_topology,
          "flow and path representations need a cycle or a line window, got " + g.describe());
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

FlowLedger::FlowLedger(const Graph& g)
    : n_(g.vertex_count()), periodic_(g.topology() == Topology::cycle) {
  require_one_dimensional(g);
  degree_.resize(static_cast<std::size_t>(n_));
  for (Vertex v = 0; v < n_; ++v) degree_[static_cast<std::size_t>(v)] = g.degree(v);
  flow_.assign(static_cast<std::size_t>(periodic_ ? n_ : n_ - 1), 0.0);
}

double FlowLedger::at(std::int64_t x) const {
  const auto m = static_cast<std::int64_t>(flow_.size());
  if (periodic_) {
    x %= m;
    if (x < 0) x += m;
  }
  require(x >= 0 && x < m, ErrorKind::invalid_parameter, "edge index out of range");
  return flow_[static_cast<std::size_t>(x)];
}

FlowRun accumulate_flow(const Graph& g, const MassState& state0, const EventLog& log, double t_end) {
  FlowLedger ledger(g);
  MassState s = simulate_observed(g, state0, log, t_end, [&](const Event& e, double pre, const MassState&) {
    ledger.record(e.vertex, pre);
  });
  ledger.time = t_end;
  return {std::move(ledger), std::move(s)};
}

double telescoping_residual(const FlowLedger& ledger, const MassState& state0, const MassState& state_t) {
  const auto n = static_cast<std::int64_t>(state0.size());
  double worst = 0.0;
  double moved = 0.0;
  const std::int64_t last = ledger.periodic() ? n - 1 : n - 2;
  for (std::int64_t x = 1; x <= last; ++x) {
    moved += state_t.masses[static_cast<std::size_t>(x)] - state0.masses[static_cast<std::size_t>(x)];
    worst = std::max(worst, std::abs(ledger.at(0) - ledger.at(x) - moved));
  }
  return worst;
}

PathRep PathRep::init(const Graph& g, const MassState& state0, Vertex origin) {
  require_one_dimensional(g);
  validate_state(g, state0);
  require(origin >= 0 && origin < g.vertex_count(), ErrorKind::invalid_parameter, "origin out of range");
  PathRep rep;
  rep.n_ = g.vertex_count();
  rep.periodic_ = g.topology() == Topology::cycle;
  rep.g_.assign(static_cast<std::size_t>(rep.n_) + 1, 0.0);
  for (int k = 0; k < rep.n_; ++k)
    rep.g_[static_cast<std::size_t>(k) + 1] = rep.g_[static_cast<std::size_t>(k)] + state0.masses[static_cast<std::size_t>(k)];
  rep.total_ = rep.g_.back();
  const double shift = rep.g_[static_cast<std::size_t>(origin)];
  for (double& x : rep.g_) x -= shift;
  return rep;
}

double PathRep::gamma(std::int64_t k) const {
  if (!periodic_) {
    require(k >= 0 && k <= n_, ErrorKind::window_exhausted, "gamma index outside the line");
    return g_[static_cast<std::size_t>(k)];
  }
  const std::int64_t wraps = floor_div(k, n_);
  return g_[static_cast<std::size_t>(k - wraps * n_)] + static_cast<double>(wraps) * total_;
}

double PathRep::mass(Vertex v) const {
  return g_[static_cast<std::size_t>(v) + 1] - g_[static_cast<std::size_t>(v)];
}

void PathRep::step(Vertex v) {
  const auto i = static_cast<std::size_t>(v);
  const double lo = g_[i], hi = g_[i + 1];
  if (lo == hi) return;
  double cut;
  if (periodic_ || (v > 0 && v + 1 < n_)) cut = 0.5 * (lo + hi);
  else if (n_ == 1) return;
  else cut = v == 0 ? lo : hi;
  g_[i] = g_[i + 1] = cut;
  if (periodic_) {
    if (v == 0) g_[static_cast<std::size_t>(n_)] = cut + total_;
    if (v == n_ - 1) g_[0] = cut - total_;
  }
  for (Label& l : labels_) {
    std::int64_t wraps = 0;
    if (periodic_) {
      wraps = floor_div(l.position, n_);
      if (l.position - wraps * n_ != v) continue;
    } else if (l.position != v) {
      continue;
    }
    const double c = cut + static_cast<double>(wraps) * total_;
    l.position += l.y < c ? -1 : 1;
  }
}

std::int64_t PathRep::locate(double y) const {
  std::int64_t wraps = 0;
  if (periodic_) {
    require(total_ > 0.0, ErrorKind::invalid_state, "no tracer position without mass");
    wraps = static_cast<std::int64_t>(std::floor((y - g_[0]) / total_));
    y -= static_cast<double>(wraps) * total_;
    // Rounding at the period boundary.
    if (y < g_[0]) { y += total_; --wraps; }
    if (y >= g_.back()) { y -= total_; ++wraps; }
  } else {
    require(y >= g_.front() && y < g_.back(), ErrorKind::window_exhausted,
            "label outside the represented window");
  }
  // Last index k with Gamma^k <= y; plateaus resolve to their right end.
  const auto it = std::upper_bound(g_.begin(), g_.end(), y);
  const auto k = static_cast<std::int64_t>(it - g_.begin()) - 1;
  return k + wraps * n_;
}

std::size_t PathRep::track(double y) {
  labels_.push_back({y, locate(y)});
  return labels_.size() - 1;
}

std::int64_t winding_check(const Graph& g, const MassState& state0, double theta, const EventLog& log,
                           double t_end) {
  require(g.topology() == Topology::cycle, ErrorKind::unsupported_topology, "winding needs a cycle");
  PathRep rep = PathRep::init(g, state0);
  const auto id = rep.track(theta);
  const std::int64_t h0 = rep.position(id);
  std::int64_t worst = 0;
  for (const Event& e : merged_events(log)) {
    if (e.time > t_end) break;
    rep.step(e.vertex);
    worst = std::max(worst, std::abs(rep.position(id) - h0));
  }
  return worst;
}

std::int64_t winding_check_streaming(const Graph& g, const MassState& state0, double theta,
                                     std::uint64_t seed, std::uint64_t events) {
  require(g.topology() == Topology::cycle, ErrorKind::unsupported_topology, "winding needs a cycle");
  PathRep rep = PathRep::init(g, state0);
  const auto id = rep.track(theta);
  const std::int64_t h0 = rep.position(id);
  std::int64_t worst = 0;
  StreamingClock clock(g.vertex_count(), seed);
  for (std::uint64_t i = 0; i < events; ++i) {
    rep.step(clock.next_vertex());
    worst = std::max(worst, std::abs(rep.position(id) - h0));
  }
  return worst;
}

void write_flow_csv(std::ostream& out, const FlowLedger& ledger) {
  out << "edge,flow\n";
  char buf[64];
  const auto e = ledger.edges();
  for (std::size_t x = 0; x < e.size(); ++x) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", x, e[x]);
    out << buf;
  }
}

}  // namespace meteor

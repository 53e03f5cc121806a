#include "meteor/process.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace meteor {

MassState flat_state(const Graph& g, double level) {
  return MassState{std::vector<double>(static_cast<std::size_t>(g.vertex_count()), level), 0.0};
}

MassState atom_state(const Graph& g, Vertex at, double mass) {
  require(at >= 0 && at < g.vertex_count(), ErrorKind::invalid_parameter, "atom vertex out of range");
  MassState s = flat_state(g, 0.0);
  s.masses[static_cast<std::size_t>(at)] = mass;
  return s;
}

void validate_state(const Graph& g, const MassState& s) {
  require(s.masses.size() == static_cast<std::size_t>(g.vertex_count()), ErrorKind::invalid_state,
          "state size does not match the graph");
  for (double m : s.masses)
    require(m >= 0.0 && std::isfinite(m), ErrorKind::invalid_state, "masses must be finite and >= 0");
}

MassState hit(const MassState& state, Vertex v, const Graph& g) {
  MassState out = state;
  apply_hit(out.masses, g, v);
  return out;
}

double DriftMonitor::relative_drift(std::span<const double> masses) const {
  double total = 0.0;
  for (double m : masses) total += m;
  const double scale = std::max(std::abs(initial_), std::numeric_limits<double>::min());
  return std::abs(total - initial_) / scale;
}

void DriftMonitor::check(std::span<const double> masses) const {
  if (initial_ == 0.0) return;
  const double drift = relative_drift(masses);
  require(drift <= kTolerance, ErrorKind::invalid_state,
          "total mass drifted by " + std::to_string(drift) + " (relative)");
}

MassState simulate(const Graph& g, const MassState& state0, const EventLog& log, double t_end) {
  return simulate_observed(g, state0, log, t_end, [](const Event&, double, const MassState&) {});
}

namespace {

// Hits of v with times in (lo, hi) (open_hi) or (lo, hi] (closed).
std::pair<std::size_t, std::size_t> hit_range(std::span<const double> h, double lo, double hi,
                                              bool closed_hi) {
  const auto first = std::upper_bound(h.begin(), h.end(), lo) - h.begin();
  const auto last = closed_hi ? std::upper_bound(h.begin(), h.end(), hi) - h.begin()
                              : std::lower_bound(h.begin(), h.end(), hi) - h.begin();
  return {static_cast<std::size_t>(first), static_cast<std::size_t>(std::max(first, last))};
}

}  // namespace

double mass_via_paths(const Graph& g, const MassState& state0, const EventLog& log, Vertex x,
                      double T, std::size_t budget) {
  require(T >= 0.0 && T <= log.horizon(), ErrorKind::invalid_parameter, "T outside [0, horizon]");
  require(log.vertex_count() == g.vertex_count(), ErrorKind::invalid_parameter,
          "log and graph sizes differ");
  validate_state(g, state0);

  // memo[id] is the path-sum mass at vertex v just before its i-th hit,
  // id = first_index(v) + i.
  constexpr double kUnset = -1.0;
  std::vector<double> memo(log.total_events(), kUnset);
  std::vector<Vertex> owner(log.total_events());
  for (Vertex v = 0; v < g.vertex_count(); ++v)
    for (std::size_t i = 0; i < log.hits(v).size(); ++i) owner[log.first_index(v) + i] = v;
  std::size_t evaluated = 0;

  // Window of arrivals feeding (v, before time hi): hits of neighbours after
  // the previous hit of v (or time 0).
  auto window_lo = [&](Vertex v, std::size_t hits_before) {
    return hits_before == 0 ? 0.0 : log.hits(v)[hits_before - 1];
  };

  // Sum over arrivals, or nullopt-like signal via `missing` when a dependency
  // is not computed yet.
  auto gather = [&](Vertex v, double lo, double hi, bool closed_hi, std::vector<std::size_t>* missing) {
    double sum = 0.0;
    for (Vertex u : g.neighbors(v)) {
      auto h = log.hits(u);
      auto [a, b] = hit_range(h, lo, hi, closed_hi);
      const double inv_degree = 1.0 / g.degree(u);
      for (std::size_t j = a; j < b; ++j) {
        const std::size_t id = log.first_index(u) + j;
        if (memo[id] == kUnset) {
          if (missing) missing->push_back(id);
        } else {
          sum += memo[id] * inv_degree;
        }
      }
    }
    return sum;
  };

  auto hit_position = [&](std::size_t id) { return id - log.first_index(owner[id]); };

  auto evaluate_all = [&](std::vector<std::size_t> roots) {
    std::vector<std::size_t> stack = std::move(roots);
    std::vector<std::size_t> missing;
    while (!stack.empty()) {
      const std::size_t id = stack.back();
      if (memo[id] != kUnset) {
        stack.pop_back();
        continue;
      }
      const Vertex v = owner[id];
      const std::size_t i = hit_position(id);
      const double hi = log.hits(v)[i];
      missing.clear();
      const double arrivals = gather(v, window_lo(v, i), hi, false, &missing);
      if (!missing.empty()) {
        stack.insert(stack.end(), missing.begin(), missing.end());
        continue;
      }
      const double stayed = i == 0 ? state0.masses[static_cast<std::size_t>(v)] : 0.0;
      memo[id] = stayed + arrivals;
      stack.pop_back();
      if (++evaluated > budget)
        fail(ErrorKind::budget_exceeded,
             "path recursion exceeded " + std::to_string(budget) + " states");
    }
  };

  const auto hx = log.hits(x);
  const std::size_t before = static_cast<std::size_t>(
      std::upper_bound(hx.begin(), hx.end(), T) - hx.begin());
  const double lo = window_lo(x, before);

  std::vector<std::size_t> roots;
  gather(x, lo, T, true, &roots);
  evaluate_all(std::move(roots));
  const double stayed = before == 0 ? state0.masses[static_cast<std::size_t>(x)] : 0.0;
  return stayed + gather(x, lo, T, true, nullptr);
}

bool boundary_cone_clear(const Graph& g, const EventLog& log, std::span<const Vertex> observation,
                         double T) {
  const auto boundary = g.boundary_layer();
  return boundary_cone_clear(g, log, observation, boundary, T);
}

bool boundary_cone_clear(const Graph& g, const EventLog& log, std::span<const Vertex> observation,
                         std::span<const Vertex> boundary, double T) {
  require(T >= 0.0 && T <= log.horizon(), ErrorKind::invalid_parameter, "T outside [0, horizon]");
  const auto n = static_cast<std::size_t>(g.vertex_count());
  std::vector<char> source(n, 0), reached(n, 0), watched(n, 0);
  for (Vertex b : boundary) source[b] = reached[b] = 1;
  for (Vertex o : observation) {
    if (reached[o]) return false;
    watched[o] = 1;
  }
  for (const Event& e : merged_events(log)) {
    if (e.time > T) break;
    if (!reached[e.vertex]) continue;
    for (Vertex u : g.neighbors(e.vertex)) {
      if (watched[u]) return false;
      reached[u] = 1;
    }
    reached[e.vertex] = source[e.vertex];
  }
  return true;
}

ZeroSetReport zero_set_check(const Graph& g, const MassState& state0, const EventLog& log, double t) {
  require(t >= 0.0 && t <= log.horizon(), ErrorKind::invalid_parameter, "t outside [0, horizon]");
  const MassState s = simulate(g, state0, log, t);
  ZeroSetReport report;
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    const auto nb = g.neighbors(v);
    const bool hypothesis = std::all_of(nb.begin(), nb.end(), [&](Vertex x) { return state0[x] > 0.0; });
    if (!hypothesis) {
      report.skipped.push_back(v);
      continue;
    }
    report.checked.push_back(v);
    const double own = log.last_hit_before(v, t);
    double neighbour_last = kNoHit;
    for (Vertex x : nb) neighbour_last = std::max(neighbour_last, log.last_hit_before(x, t));
    const bool rule_a = own > kNoHit && own >= neighbour_last;
    const bool rule_b = state0[v] == 0.0 && neighbour_last == kNoHit;
    const bool zero = s[v] == 0.0;
    if (zero != (rule_a || rule_b)) {
      report.violations.push_back(v);
      report.passed = false;
    }
  }
  return report;
}

std::int64_t zero_pair_count(const MassState& state, const Graph& g) {
  std::int64_t count = 0;
  for (Vertex x = 0; x < g.vertex_count(); ++x) {
    if (state[x] != 0.0) continue;
    for (Vertex v : g.neighbors(x))
      if (state[v] == 0.0) ++count;
  }
  return count;
}

std::vector<double> heat_mean_profile(const Graph& g, const MassState& state0, double t) {
  require(t >= 0.0 && std::isfinite(t), ErrorKind::invalid_parameter, "t must be finite and >= 0");
  validate_state(g, state0);
  const auto n = static_cast<std::size_t>(g.vertex_count());
  std::vector<double> u = state0.masses;
  const double total = state0.total();
  constexpr double kTolerance = 1e-10;
  constexpr double kChunk = 32.0;

  // d/dt u = (A - I) u with (A u)(x) = sum_{y~x} u(y)/d_y; uniformized in
  // chunks so exp(-chunk) never underflows.
  std::vector<double> term(n), next(n), acc(n);
  double remaining = t;
  while (remaining > 0.0) {
    const double tau = std::min(remaining, kChunk);
    remaining -= tau;
    term = u;
    double weight = std::exp(-tau);
    double cumulative = weight;
    for (std::size_t i = 0; i < n; ++i) acc[i] = weight * term[i];
    for (int k = 1; (1.0 - cumulative) * total > kTolerance * 0.5 && k < 10000; ++k) {
      std::fill(next.begin(), next.end(), 0.0);
      for (Vertex y = 0; y < g.vertex_count(); ++y) {
        const double share = term[static_cast<std::size_t>(y)] / g.degree(y);
        if (share == 0.0) continue;
        for (Vertex x : g.neighbors(y)) next[static_cast<std::size_t>(x)] += share;
      }
      term.swap(next);
      weight *= tau / k;
      cumulative += weight;
      for (std::size_t i = 0; i < n; ++i) acc[i] += weight * term[i];
    }
    u = acc;
  }
  return u;
}

double heat_mean_oracle(const Graph& g, const MassState& state0, Vertex x, double t) {
  require(x >= 0 && x < g.vertex_count(), ErrorKind::invalid_parameter, "vertex out of range");
  return heat_mean_profile(g, state0, t)[static_cast<std::size_t>(x)];
}

void write_state_csv(std::ostream& out, const MassState& s) {
  out << "vertex,mass\n";
  char buf[64];
  for (std::size_t v = 0; v < s.masses.size(); ++v) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", v, s.masses[v]);
    out << buf;
  }
}

MassState read_state_csv(std::istream& in) {
  MassState s;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("vertex", 0) == 0) continue;
    std::istringstream row(line);
    std::size_t v = 0;
    char comma = 0;
    double m = 0.0;
    require(static_cast<bool>(row >> v >> comma >> m) && comma == ',', ErrorKind::io_error,
            "bad state row: " + line);
    require(v == s.masses.size(), ErrorKind::io_error, "state rows must list vertices in order");
    s.masses.push_back(m);
  }
  return s;
}

namespace {
constexpr std::array<char, 8> kStateMagic = {'M', 'E', 'T', 'E', 'O', 'R', 'M', 'S'};

void put_u64(std::ostream& out, std::uint64_t bits, int bytes) {
  for (int i = 0; i < bytes; ++i) out.put(static_cast<char>((bits >> (8 * i)) & 0xff));
}
std::uint64_t get_u64(std::istream& in, int bytes) {
  std::uint64_t bits = 0;
  for (int i = 0; i < bytes; ++i) {
    const int c = in.get();
    require(c != std::char_traits<char>::eof(), ErrorKind::io_error, "state snapshot truncated");
    bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
  }
  return bits;
}
}  // namespace

void write_state_binary(std::ostream& out, const MassState& s) {
  out.write(kStateMagic.data(), kStateMagic.size());
  put_u64(out, 1, 4);
  put_u64(out, s.masses.size(), 4);
  put_u64(out, std::bit_cast<std::uint64_t>(s.time), 8);
  for (double m : s.masses) put_u64(out, std::bit_cast<std::uint64_t>(m), 8);
}

MassState read_state_binary(std::istream& in) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  require(static_cast<bool>(in) && magic == kStateMagic, ErrorKind::io_error, "bad snapshot magic");
  require(get_u64(in, 4) == 1, ErrorKind::io_error, "unsupported snapshot version");
  MassState s;
  s.masses.resize(get_u64(in, 4));
  s.time = std::bit_cast<double>(get_u64(in, 8));
  for (double& m : s.masses) m = std::bit_cast<double>(get_u64(in, 8));
  return s;
}

}  // namespace meteor

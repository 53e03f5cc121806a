#include "meteor/wimps.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include <boost/math/distributions/students_t.hpp>
#include <boost/rational.hpp>

namespace meteor {

Vertex Trajectory::at(double t) const {
  const auto it = std::upper_bound(jump_times.begin(), jump_times.end(), t);
  return vertices[static_cast<std::size_t>(it - jump_times.begin())];
}

std::vector<Vertex> sample_wimp_starts(const MassState& state0, int walks, std::uint64_t seed) {
  require(walks >= 0, ErrorKind::invalid_parameter, "walk count must be >= 0");
  const double total = state0.total();
  require(total > 0.0, ErrorKind::invalid_state, "WIMP starts need positive total mass");
  std::vector<double> cumulative(state0.size());
  std::partial_sum(state0.masses.begin(), state0.masses.end(), cumulative.begin());
  std::vector<Vertex> starts;
  for (int i = 0; i < walks; ++i) {
    Stream s(seed, StreamDomain::wimp_start, static_cast<std::uint64_t>(i));
    const double u = s.uniform() * cumulative.back();
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    if (it == cumulative.end()) --it;
    // Skip zero-mass vertices that share the cumulative value.
    while (state0.masses[static_cast<std::size_t>(it - cumulative.begin())] == 0.0) ++it;
    starts.push_back(static_cast<Vertex>(it - cumulative.begin()));
  }
  return starts;
}

WimpRun run_wimps_from(const Graph& g, std::span<const Vertex> starts, const EventLog& log, double t,
                       std::uint64_t seed, bool record) {
  require(t >= 0.0 && t <= log.horizon(), ErrorKind::invalid_parameter, "t outside [0, horizon]");
  WimpRun run;
  run.start.assign(starts.begin(), starts.end());
  for (std::size_t i = 0; i < starts.size(); ++i) {
    require(starts[i] >= 0 && starts[i] < g.vertex_count(), ErrorKind::invalid_parameter,
            "start vertex out of range");
    Trajectory tr = advance_walk(g, log, starts[i], static_cast<int>(i), t, seed, record);
    run.positions.push_back(tr.final_vertex());
    if (record) run.paths.push_back(std::move(tr));
  }
  return run;
}

WimpRun run_wimps(const Graph& g, const MassState& state0, const EventLog& log, int walks, double t,
                  std::uint64_t seed, bool record) {
  validate_state(g, state0);
  const auto starts = sample_wimp_starts(state0, walks, seed);
  return run_wimps_from(g, starts, log, t, seed, record);
}

bool follows_clock(const Graph& g, const EventLog& log, const Trajectory& tr, double t_end) {
  if (tr.vertices.size() != tr.jump_times.size() + 1) return false;
  double since = 0.0;
  for (std::size_t i = 0; i < tr.jump_times.size(); ++i) {
    const Vertex v = tr.vertices[i];
    if (log.next_hit_after(v, since) != tr.jump_times[i]) return false;
    if (!g.adjacent(v, tr.vertices[i + 1])) return false;
    since = tr.jump_times[i];
  }
  return log.next_hit_after(tr.vertices.back(), since) > t_end;
}

void write_trajectories_csv(std::ostream& out, const WimpRun& run) {
  out << "time,walk,vertex\n";
  char buf[80];
  for (std::size_t w = 0; w < run.paths.size(); ++w) {
    const auto& tr = run.paths[w];
    std::snprintf(buf, sizeof buf, "0,%zu,%d\n", w, tr.vertices[0]);
    out << buf;
    for (std::size_t i = 0; i < tr.jump_times.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g,%zu,%d\n", tr.jump_times[i], w, tr.vertices[i + 1]);
      out << buf;
    }
  }
}

namespace {

using Q = boost::rational<std::int64_t>;

std::string show(const Q& q) {
  if (q.denominator() == 1) return std::to_string(q.numerator());
  return std::to_string(q.numerator()) + "/" + std::to_string(q.denominator());
}

}  // namespace

PrimeCheck verify_prime_solution(int d) {
  require(d >= 1, ErrorKind::invalid_parameter, "dimension must be >= 1");
  const Q zero(1);
  const Q h(6 * d - 3, 8 * d);
  const Q other(3, 4);
  const Q dd(d);
  const Q third(1, 3);

  PrimeCheck check;
  check.dimension = d;
  check.value_zero = show(zero);
  check.value_h = show(h);
  check.value_other = show(other);

  auto add = [&](std::string name, Q lhs, Q rhs) {
    check.equations.push_back({std::move(name), show(lhs), show(rhs), lhs == rhs});
  };
  // Coincidence class.
  add("zero", zero, Q(1 + 2 * d, 4 * d) * zero + Q(2, 3) * h);
  // Gap class h.
  add("h", h, Q(1) / (3 * dd) * other + Q(2 * d - 2) / (3 * dd) * other + third * h);
  // Gap class a.
  add("a", other,
      Q(1) / (4 * dd * dd) * zero + Q(2) / (3 * dd) * h + Q(2 * d - 2) / (3 * dd) * other + third * other);
  // Gap class b.
  add("b", other,
      Q(1) / (8 * dd * dd) * zero + Q(1) / (3 * dd) * h + Q(2 * d - 1) / (3 * dd) * other + third * other);
  // Everything else.
  add("g", other, Q(2, 3) * other + third * other);

  check.passed = std::all_of(check.equations.begin(), check.equations.end(),
                             [](const EquationCheck& e) { return e.holds; });
  return check;
}

ThirdMomentCheck third_moment_crosscheck(std::span<const MassState> samples, std::uint64_t seed,
                                         int draws, int batches) {
  require(samples.size() >= 100, ErrorKind::insufficient_samples,
          "third-moment check needs at least 100 samples");
  require(draws >= 0 && batches >= 2, ErrorKind::invalid_parameter, "draws >= 0 and batches >= 2");
  const std::size_t n = samples.size();
  std::vector<double> lhs(n), rhs(n);
  for (std::size_t s = 0; s < n; ++s) {
    const auto& m = samples[s].masses;
    const double k = static_cast<double>(m.size());
    double cubes = 0.0;
    for (double x : m) cubes += x * x * x;
    lhs[s] = cubes / k;
    if (draws == 0) {
      rhs[s] = lhs[s];
      continue;
    }
    // k^2 (M^{Z1}/k)^2 = (M^{Z1})^2 with Z1 drawn proportional to M.
    const auto starts = sample_wimp_starts(samples[s], draws,
                                           derive_key(seed, StreamDomain::experiment, s));
    double acc = 0.0;
    for (Vertex z : starts) acc += m[static_cast<std::size_t>(z)] * m[static_cast<std::size_t>(z)];
    rhs[s] = acc / draws;
  }

  const std::size_t b = std::min<std::size_t>(static_cast<std::size_t>(batches), n);
  auto batch_ci = [&](auto value) {
    std::vector<double> means(b, 0.0);
    std::vector<std::size_t> counts(b, 0);
    for (std::size_t s = 0; s < n; ++s) {
      const std::size_t i = s * b / n;
      means[i] += value(s);
      ++counts[i];
    }
    double mean = 0.0;
    for (std::size_t i = 0; i < b; ++i) {
      means[i] /= static_cast<double>(counts[i]);
      mean += means[i];
    }
    mean /= static_cast<double>(b);
    double ss = 0.0;
    for (double x : means) ss += (x - mean) * (x - mean);
    const double se = std::sqrt(ss / static_cast<double>(b - 1) / static_cast<double>(b));
    const boost::math::students_t t(static_cast<double>(b - 1));
    return std::pair{mean, boost::math::quantile(boost::math::complement(t, 0.025)) * se};
  };

  ThirdMomentCheck out;
  out.samples = n;
  std::tie(out.lhs, out.lhs_ci) = batch_ci([&](std::size_t s) { return lhs[s]; });
  std::tie(out.rhs, out.rhs_ci) = batch_ci([&](std::size_t s) { return rhs[s]; });
  std::tie(out.gap, out.gap_ci) = batch_ci([&](std::size_t s) { return lhs[s] - rhs[s]; });
  out.pooled_ci = std::hypot(out.lhs_ci, out.rhs_ci);
  out.within_ci = std::abs(out.gap) <= out.pooled_ci + 1e-12 * std::max(1.0, std::abs(out.lhs));
  return out;
}

}  // namespace meteor

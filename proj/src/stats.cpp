#include "meteor/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include "json.hpp"

namespace meteor {

const char* to_string(InitialLaw law) noexcept {
  switch (law) {
    case InitialLaw::flat: return "flat";
    case InitialLaw::atom: return "atom";
    case InitialLaw::iid_exponential: return "iid-exponential";
    case InitialLaw::zero_or_two: return "zero-or-two";
  }
  return "unknown";
}

InitialLaw parse_initial_law(const std::string& name) {
  for (auto law : {InitialLaw::flat, InitialLaw::atom, InitialLaw::iid_exponential, InitialLaw::zero_or_two})
    if (name == to_string(law)) return law;
  fail(ErrorKind::invalid_parameter, "unknown initial law '" + name + "'");
}

MassState initial_state(const Graph& g, InitialLaw law, std::uint64_t seed) {
  const int k = g.vertex_count();
  switch (law) {
    case InitialLaw::flat: return flat_state(g, 1.0);
    case InitialLaw::atom: return atom_state(g, 0, static_cast<double>(k));
    case InitialLaw::iid_exponential: {
      Stream s(seed, StreamDomain::initial_state, 0);
      MassState m = flat_state(g, 0.0);
      for (double& x : m.masses) x = s.exponential();
      return m;
    }
    case InitialLaw::zero_or_two: {
      Stream s(seed, StreamDomain::initial_state, 1);
      return flat_state(g, s.below(2) == 0 ? 0.0 : 2.0);
    }
  }
  fail(ErrorKind::invalid_parameter, "unknown initial law");
}

std::vector<MassState> stationary_sample(const Graph& g, const MassState& state0,
                                         std::uint64_t burn_in_events, std::size_t n_samples,
                                         std::uint64_t gap_events, std::uint64_t seed) {
  validate_state(g, state0);
  std::vector<MassState> out;
  if (n_samples == 0) return out;
  require(gap_events >= 1, ErrorKind::invalid_parameter, "gap must be at least one event");
  out.reserve(n_samples);
  MassState s = state0;
  StreamingClock clock(g.vertex_count(), seed);
  DriftMonitor drift(s.total());
  auto run = [&](std::uint64_t events) {
    for (std::uint64_t i = 0; i < events; ++i) {
      apply_hit(s.masses, g, clock.next().vertex);
      drift.tick(s.masses);
    }
    s.time = clock.now();
  };
  run(burn_in_events);
  for (std::size_t i = 0; i < n_samples; ++i) {
    run(gap_events);
    out.push_back(s);
  }
  drift.check(s.masses);
  return out;
}

std::vector<MassState> stationary_sample(const Graph& g, std::uint64_t burn_in_events,
                                         std::size_t n_samples, std::uint64_t gap_events,
                                         std::uint64_t seed) {
  return stationary_sample(g, flat_state(g), burn_in_events, n_samples, gap_events, seed);
}

double student_t_975(std::size_t dof) {
  require(dof >= 1, ErrorKind::insufficient_samples, "need at least two replicas for a CI");
  const boost::math::students_t t(static_cast<double>(dof));
  return boost::math::quantile(boost::math::complement(t, 0.025));
}

Estimate replica_estimate(std::span<const double> values) {
  Estimate e;
  e.count = values.size();
  require(e.count >= 2, ErrorKind::insufficient_samples, "need at least two replicas");
  double sum = 0.0;
  for (double v : values) sum += v;
  e.value = sum / static_cast<double>(e.count);
  double ss = 0.0;
  for (double v : values) ss += (v - e.value) * (v - e.value);
  const double se = std::sqrt(ss / static_cast<double>(e.count - 1) / static_cast<double>(e.count));
  e.ci = student_t_975(e.count - 1) * se;
  return e;
}

namespace {

// Cyclic window sums of width n along every axis of a torus (or the cycle).
std::vector<double> box_sums(std::span<const double> m, const Graph& g, int n) {
  const int side = g.side(), d = g.dimension();
  std::vector<double> cur(m.begin(), m.end()), next(cur.size());
  std::int64_t stride = 1;
  for (int axis = d - 1; axis >= 0; --axis) {
    for (std::size_t v = 0; v < cur.size(); ++v) {
      const std::int64_t coord = (static_cast<std::int64_t>(v) / stride) % side;
      const std::int64_t base = static_cast<std::int64_t>(v) - coord * stride;
      double acc = 0.0;
      for (int j = 0; j < n; ++j) acc += cur[static_cast<std::size_t>(base + ((coord + j) % side) * stride)];
      next[v] = acc;
    }
    cur.swap(next);
    stride *= side;
  }
  return cur;
}

}  // namespace

double box_sum_second_moment(const MassState& s, const Graph& g, int n) {
  require(g.is_vertex_transitive(), ErrorKind::unsupported_topology, "box sums need a cycle or torus");
  require(n >= 1 && n <= g.side(), ErrorKind::invalid_parameter, "box side out of range");
  const auto sums = box_sums(s.masses, g, n);
  double acc = 0.0;
  for (double x : sums) acc += x * x;
  return acc / static_cast<double>(sums.size());
}

ReplicaMoments replica_moments(std::span<const MassState> samples, const Graph& g,
                               std::span<const int> box_sides, double scale) {
  require(g.is_vertex_transitive(), ErrorKind::unsupported_topology,
          "shift-averaged moments need a cycle or torus");
  require(!samples.empty(), ErrorKind::insufficient_samples, "replica without samples");
  const int d = g.dimension();
  const int k = g.vertex_count();
  std::vector<int> far_offset(static_cast<std::size_t>(d), 0);
  far_offset[0] = 2;
  std::vector<Vertex> far(static_cast<std::size_t>(k));
  for (Vertex v = 0; v < k; ++v) far[static_cast<std::size_t>(v)] = g.translate(v, far_offset);

  ReplicaMoments r;
  r.samples = samples.size();
  r.box_variance.assign(box_sides.size(), 0.0);
  double nbr = 0.0, farp = 0.0;
  std::vector<double> scaled(static_cast<std::size_t>(k));
  for (const MassState& s : samples) {
    require(s.masses.size() == static_cast<std::size_t>(k), ErrorKind::invalid_state, "sample size mismatch");
    for (int v = 0; v < k; ++v) scaled[static_cast<std::size_t>(v)] = scale * s.masses[static_cast<std::size_t>(v)];
    double m1 = 0.0, m2 = 0.0, m3 = 0.0, pn = 0.0, pf = 0.0;
    for (Vertex v = 0; v < k; ++v) {
      const double x = scaled[static_cast<std::size_t>(v)];
      m1 += x;
      m2 += x * x;
      m3 += x * x * x;
      for (Vertex u : g.neighbors(v)) pn += x * scaled[static_cast<std::size_t>(u)];
      pf += x * scaled[static_cast<std::size_t>(far[static_cast<std::size_t>(v)])];
    }
    r.mean += m1 / k;
    r.second += m2 / k;
    r.third += m3 / k;
    nbr += pn / (2.0 * d * k);
    farp += pf / k;
    r.plain_mean += scaled[0];
    r.plain_second += scaled[0] * scaled[0];
    for (std::size_t i = 0; i < box_sides.size(); ++i)
      r.box_variance[i] += box_sum_second_moment(MassState{scaled, 0.0}, g, box_sides[i]);
  }
  const double n = static_cast<double>(samples.size());
  r.mean /= n;
  r.second /= n;
  r.third /= n;
  r.plain_mean /= n;
  r.plain_second /= n;
  const double mean2 = r.mean * r.mean;
  r.variance = r.second - mean2;
  r.cov_neighbor = nbr / n - mean2;
  r.cov_far = farp / n - mean2;
  for (std::size_t i = 0; i < box_sides.size(); ++i) {
    const double cells = std::pow(static_cast<double>(box_sides[i]), d);
    r.box_variance[i] = r.box_variance[i] / n - cells * cells * mean2;
  }
  return r;
}

const Quantity& MomentReport::at(const std::string& name) const {
  for (const auto& q : quantities)
    if (q.name == name) return q;
  fail(ErrorKind::invalid_parameter, "no quantity named " + name);
}

bool MomentReport::passed() const {
  return std::all_of(quantities.begin(), quantities.end(), [](const Quantity& q) { return q.pass; });
}

MomentReport moment_report(std::span<const ReplicaMoments> replicas, const Graph& g,
                           std::span<const int> box_sides, const Tolerances& tol) {
  require(replicas.size() >= 2, ErrorKind::insufficient_samples, "moment report needs >= 2 replicas");
  std::size_t total = 0;
  for (const auto& r : replicas) total += r.samples;
  require(total >= 100, ErrorKind::insufficient_samples, "moment report needs >= 100 samples");

  MomentReport rep;
  rep.graph = g.describe();
  rep.dimension = g.dimension();
  rep.replicas = replicas.size();
  rep.samples_per_replica = replicas.front().samples;
  rep.per_replica.assign(replicas.begin(), replicas.end());
  const double d = g.dimension();

  auto column = [&](auto field) {
    std::vector<double> v;
    v.reserve(replicas.size());
    for (const auto& r : replicas) v.push_back(field(r));
    return replica_estimate(v);
  };
  auto add = [&](std::string name, Estimate e, double target, double tolerance, bool relative) {
    Quantity q{std::move(name), e.value, e.ci, target, tolerance, relative, true};
    if (!std::isnan(target)) {
      const double allowed = relative ? tolerance * std::abs(target) : tolerance;
      q.pass = std::abs(e.value - target) <= allowed;
    }
    rep.quantities.push_back(std::move(q));
  };
  const double nan = std::numeric_limits<double>::quiet_NaN();

  add("mean", column([](const ReplicaMoments& r) { return r.mean; }), 1.0, tol.mean, false);
  add("variance", column([](const ReplicaMoments& r) { return r.variance; }), 1.0, tol.variance, false);
  add("cov_neighbor", column([](const ReplicaMoments& r) { return r.cov_neighbor; }), -1.0 / (2.0 * d),
      tol.cov_neighbor, false);
  add("cov_far", column([](const ReplicaMoments& r) { return r.cov_far; }), 0.0, tol.cov_far, false);
  for (std::size_t i = 0; i < box_sides.size(); ++i) {
    const int n = box_sides[i];
    add("box_variance_" + std::to_string(n), column([i](const ReplicaMoments& r) { return r.box_variance[i]; }),
        std::pow(static_cast<double>(n), d - 1.0), tol.box_relative, true);
  }
  add("third_moment", column([](const ReplicaMoments& r) { return r.third; }), nan, 0.0, false);
  add("second_moment", column([](const ReplicaMoments& r) { return r.second; }), nan, 0.0, false);
  add("second_moment_plain", column([](const ReplicaMoments& r) { return r.plain_second; }), nan, 0.0, false);
  add("mean_plain", column([](const ReplicaMoments& r) { return r.plain_mean; }), nan, 0.0, false);

  // Pooled variance: replica means are not removed.
  const auto second = column([](const ReplicaMoments& r) { return r.second; });
  const auto mean = column([](const ReplicaMoments& r) { return r.mean; });
  Estimate pooled{second.value - mean.value * mean.value, second.ci + 2 * std::abs(mean.value) * mean.ci,
                  second.count};
  add("variance_pooled", pooled, nan, 0.0, false);
  return rep;
}

MomentReport moment_report(std::span<const std::vector<MassState>> replicas, const Graph& g,
                           std::span<const int> box_sides, const Tolerances& tol) {
  std::vector<ReplicaMoments> r;
  r.reserve(replicas.size());
  for (const auto& samples : replicas) r.push_back(replica_moments(samples, g, box_sides));
  return moment_report(r, g, box_sides, tol);
}

void write_report_csv(std::ostream& out, const MomentReport& report) {
  out << "quantity,estimate,ci,target,pass\n";
  char buf[256];
  for (const auto& q : report.quantities) {
    if (std::isnan(q.target))
      std::snprintf(buf, sizeof buf, "%s,%.10g,%.6g,,\n", q.name.c_str(), q.estimate, q.ci);
    else
      std::snprintf(buf, sizeof buf, "%s,%.10g,%.6g,%.10g,%d\n", q.name.c_str(), q.estimate, q.ci, q.target,
                    q.pass ? 1 : 0);
    out << buf;
  }
}

std::string report_json(const MomentReport& report, const std::string& config_echo) {
  nlohmann::json j;
  j["schema"] = "meteor-moment-report/1";
  j["config"] = nlohmann::json::parse(config_echo);
  j["graph"] = report.graph;
  j["dimension"] = report.dimension;
  j["replicas"] = report.replicas;
  j["samples_per_replica"] = report.samples_per_replica;
  j["burn_in_events"] = report.burn_in_events;
  j["gap_events"] = report.gap_events;
  j["passed"] = report.passed();
  auto& qs = j["quantities"] = nlohmann::json::array();
  for (const auto& q : report.quantities) {
    nlohmann::json e{{"name", q.name}, {"estimate", q.estimate}, {"ci", q.ci}};
    if (!std::isnan(q.target)) {
      e["target"] = q.target;
      e["tolerance"] = q.tolerance;
      e["relative"] = q.relative;
      e["pass"] = q.pass;
    }
    qs.push_back(std::move(e));
  }
  return j.dump(2);
}

TailEstimate tail_estimate(std::span<const double> displacements, double m) {
  require(m >= 1.0, ErrorKind::invalid_parameter, "tail level m must be >= 1");
  require(!displacements.empty(), ErrorKind::insufficient_samples, "no displacement samples");
  TailEstimate t;
  t.total = displacements.size();
  for (double x : displacements)
    if (std::abs(x) > m) ++t.exceed;
  const double n = static_cast<double>(t.total), k = static_cast<double>(t.exceed);
  t.estimate = k / n;
  t.lower = t.exceed == 0 ? 0.0 : boost::math::quantile(boost::math::beta_distribution<>(k, n - k + 1), 0.025);
  t.upper = t.exceed == t.total ? 1.0
                                : boost::math::quantile(boost::math::beta_distribution<>(k + 1, n - k), 0.975);
  return t;
}

ScalingCheck scaling_test(std::span<const std::vector<MassState>> replicas, const Graph& g, double c) {
  require(c > 0.0, ErrorKind::invalid_parameter, "scale must be positive");
  std::vector<double> mean, var, mean_c, var_c;
  for (const auto& samples : replicas) {
    const auto base = replica_moments(samples, g);
    const auto scaled = replica_moments(samples, g, {}, c);
    mean.push_back(base.mean);
    var.push_back(base.variance);
    mean_c.push_back(scaled.mean);
    var_c.push_back(scaled.variance);
  }
  ScalingCheck out;
  out.c = c;
  const auto m = replica_estimate(mean), v = replica_estimate(var);
  const auto mc = replica_estimate(mean_c), vc = replica_estimate(var_c);
  out.mean = m.value;
  out.variance = v.value;
  out.mean_scaled = mc.value;
  out.variance_scaled = vc.value;
  out.mean_ci = mc.ci;
  out.variance_ci = vc.ci;
  const double slack = 1e-12 * (1.0 + c * c);
  out.pass = std::abs(mc.value - c * m.value) <= mc.ci + slack &&
             std::abs(vc.value - c * c * v.value) <= vc.ci + slack;
  return out;
}

bool estimates_agree(const Quantity& a, const Quantity& b, int tests) {
  const boost::math::normal z;
  const double zq = boost::math::quantile(boost::math::complement(z, 0.025 / std::max(1, tests)));
  const double se = std::sqrt(a.ci * a.ci + b.ci * b.ci) / 1.959963984540054;
  return std::abs(a.estimate - b.estimate) <= zq * se;
}

}  // namespace meteor

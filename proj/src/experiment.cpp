#include "meteor/experiment.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

namespace meteor {

namespace {

template <class T>
std::string join(const std::vector<T>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os.str();
}

}  // namespace

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string ExperimentConfig::to_ini() const {
  std::ostringstream os;
  os.precision(17);
  os << "command=" << command << '\n'
     << "topology=" << topology << '\n'
     << "side=" << side << '\n'
     << "dimension=" << dimension << '\n'
     << "edges-file=" << edges_file << '\n'
     << "initial=" << initial << '\n'
     << "horizon=" << horizon << '\n'
     << "seed=" << seed << '\n'
     << "replicas=" << replicas << '\n'
     << "samples=" << samples << '\n'
     << "burn-in=" << burn_in << '\n'
     << "gap=" << gap << '\n'
     << "times=" << join(times) << '\n'
     << "tail-m=" << join(tail_m) << '\n'
     << "box-sides=" << join(box_sides) << '\n'
     << "eps=" << eps << '\n'
     << "step-cap=" << step_cap << '\n'
     << "walks=" << walks << '\n'
     << "labels=" << labels << '\n'
     << "distance=" << distance << '\n'
     << "d-max=" << d_max << '\n';
  return os.str();
}

std::uint64_t ExperimentConfig::hash() const { return fnv1a64(to_ini()); }

std::string ExperimentConfig::header() const {
  char buf[96];
  std::snprintf(buf, sizeof buf, "# config_hash=%016llx seed=%llu", static_cast<unsigned long long>(hash()),
                static_cast<unsigned long long>(seed));
  return buf;
}

std::string ExperimentConfig::to_json() const {
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(hash()));
  const nlohmann::json j{{"config_hash", hex},
                         {"command", command},
                         {"topology", topology},
                         {"side", side},
                         {"dimension", dimension},
                         {"edges_file", edges_file},
                         {"initial", initial},
                         {"horizon", horizon},
                         {"seed", seed},
                         {"replicas", replicas},
                         {"samples", samples},
                         {"burn_in", burn_in},
                         {"gap", gap},
                         {"times", times},
                         {"tail_m", tail_m},
                         {"box_sides", box_sides},
                         {"eps", eps},
                         {"step_cap", step_cap},
                         {"walks", walks},
                         {"labels", labels},
                         {"distance", distance},
                         {"d_max", d_max}};
  return j.dump();
}

Graph build_graph(const ExperimentConfig& c) {
  if (c.topology == "cycle") return Graph::cycle(c.side);
  if (c.topology == "torus") return Graph::torus(c.side, c.dimension);
  if (c.topology == "window") return Graph::window(c.side, c.dimension);
  if (c.topology == "edges") return read_edge_list_file(c.edges_file);
  fail(ErrorKind::invalid_parameter, "unknown topology '" + c.topology + "'");
}

OracleComparison oracle_compare(const Graph& g, const MassState& state0, const EventLog& log, double T,
                                std::size_t budget) {
  OracleComparison out;
  out.simulated = simulate(g, state0, log, T).masses;
  out.oracle.resize(out.simulated.size());
  for (Vertex x = 0; x < g.vertex_count(); ++x) {
    const auto i = static_cast<std::size_t>(x);
    out.oracle[i] = mass_via_paths(g, state0, log, x, T, budget);
    const double a = out.simulated[i], b = out.oracle[i];
    const double gap = std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
    if (gap > out.max_relative_gap) {
      out.max_relative_gap = gap;
      out.worst_vertex = x;
    }
  }
  return out;
}

std::vector<std::vector<MassState>> sample_replicas(const Graph& g, InitialLaw law, std::size_t replicas,
                                                    std::uint64_t burn_in, std::size_t samples,
                                                    std::uint64_t gap, std::uint64_t seed, unsigned threads) {
  return run_replicas<std::vector<MassState>>(
      replicas,
      [&](std::size_t r) {
        const std::uint64_t s = replica_seed(seed, r);
        return stationary_sample(g, initial_state(g, law, s), burn_in, samples, gap, s);
      },
      threads);
}

std::vector<ReplicaMoments> replica_moment_runs(const Graph& g, InitialLaw law, std::size_t replicas,
                                                std::uint64_t burn_in, std::size_t samples,
                                                std::uint64_t gap, std::uint64_t seed,
                                                std::span<const int> box_sides, unsigned threads) {
  return run_replicas<ReplicaMoments>(
      replicas,
      [&](std::size_t r) {
        const std::uint64_t s = replica_seed(seed, r);
        const auto run = stationary_sample(g, initial_state(g, law, s), burn_in, samples, gap, s);
        return replica_moments(run, g, box_sides);
      },
      threads);
}

namespace {

struct FlowReplica {
  std::vector<double> shift, plain;
  double telescoping = 0.0;
};

void check_times(std::span<const double> times) {
  require(!times.empty() && std::is_sorted(times.begin(), times.end()) && times.front() > 0.0,
          ErrorKind::invalid_parameter, "times must be positive and ascending");
}

}  // namespace

FlowVariance flow_variance(int n, std::span<const double> times, std::size_t replicas, std::uint64_t burn_in,
                           std::uint64_t seed, unsigned threads) {
  check_times(times);
  const Graph g = Graph::cycle(n);
  auto runs = run_replicas<FlowReplica>(
      replicas,
      [&](std::size_t r) {
        StreamingClock clock(n, replica_seed(seed, r));
        MassState s = flat_state(g);
        for (std::uint64_t i = 0; i < burn_in; ++i) apply_hit(s.masses, g, clock.next().vertex);
        const MassState s0 = s;
        const double t0 = clock.now();
        FlowLedger ledger(g);
        FlowReplica out;
        std::size_t next = 0;
        auto snapshot = [&] {
          double sq = 0.0;
          for (double f : ledger.edges()) sq += f * f;
          out.shift.push_back(sq / n);
          out.plain.push_back(ledger.at(0) * ledger.at(0));
        };
        while (next < times.size()) {
          const Event e = clock.next();
          while (next < times.size() && e.time - t0 > times[next]) {
            snapshot();
            ++next;
          }
          const auto v = static_cast<std::size_t>(e.vertex);
          ledger.record(e.vertex, s.masses[v]);
          apply_hit(s.masses, g, e.vertex);
        }
        out.telescoping = telescoping_residual(ledger, s0, s);
        return out;
      },
      threads);

  FlowVariance fv;
  fv.times.assign(times.begin(), times.end());
  for (std::size_t i = 0; i < times.size(); ++i) {
    std::vector<double> a, b;
    for (const auto& r : runs) {
      a.push_back(r.shift[i]);
      b.push_back(r.plain[i]);
    }
    fv.shift_averaged.push_back(replica_estimate(a));
    fv.plain.push_back(replica_estimate(b));
  }
  for (const auto& r : runs) fv.worst_telescoping = std::max(fv.worst_telescoping, r.telescoping);
  return fv;
}

namespace {

struct TracerReplica {
  std::vector<std::vector<double>> disp;  // [time][label]
  bool ordered = true;
};

}  // namespace

TracerRun tracer_displacements(int n, std::span<const double> times, int labels, std::size_t replicas,
                               std::uint64_t burn_in, std::uint64_t seed, unsigned threads) {
  check_times(times);
  require(labels >= 1, ErrorKind::invalid_parameter, "need at least one label");
  const Graph g = Graph::cycle(n);
  auto runs = run_replicas<TracerReplica>(
      replicas,
      [&](std::size_t r) {
        StreamingClock clock(n, replica_seed(seed, r));
        MassState s = flat_state(g);
        for (std::uint64_t i = 0; i < burn_in; ++i) apply_hit(s.masses, g, clock.next().vertex);
        const double t0 = clock.now();
        PathRep rep = PathRep::init(g, s);
        std::vector<std::int64_t> h0;
        for (int l = 0; l < labels; ++l) {
          rep.track((l + 0.5) * rep.total() / labels);
          h0.push_back(rep.position(static_cast<std::size_t>(l)));
        }
        TracerReplica out;
        std::size_t next = 0;
        while (next < times.size()) {
          const Event e = clock.next();
          while (next < times.size() && e.time - t0 > times[next]) {
            std::vector<double> d;
            for (int l = 0; l < labels; ++l)
              d.push_back(static_cast<double>(rep.position(static_cast<std::size_t>(l)) - h0[static_cast<std::size_t>(l)]));
            out.disp.push_back(std::move(d));
            ++next;
          }
          rep.step(e.vertex);
          for (int l = 1; l < labels; ++l)
            if (rep.position(static_cast<std::size_t>(l - 1)) > rep.position(static_cast<std::size_t>(l)))
              out.ordered = false;
        }
        return out;
      },
      threads);

  TracerRun tr;
  tr.times.assign(times.begin(), times.end());
  tr.displacement.resize(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    std::vector<double> per_replica;
    for (const auto& r : runs) {
      double acc = 0.0;
      for (double d : r.disp[i]) {
        tr.displacement[i].push_back(d);
        acc += std::pow(std::abs(d), 1.5);
      }
      per_replica.push_back(acc / labels);
    }
    tr.moment_15.push_back(replica_estimate(per_replica));
  }
  for (const auto& r : runs) tr.order_preserved = tr.order_preserved && r.ordered;
  return tr;
}

CouplingSummary coupling_experiment(int d, int side, int max_distance, std::size_t runs, double t_end,
                                    std::uint64_t seed) {
  require(max_distance >= 1, ErrorKind::invalid_parameter, "distance must be >= 1");
  const Graph g = Graph::torus(side, d);
  CouplingSummary sum;
  sum.dimension = d;
  sum.side = side;
  sum.runs = runs;
  const Vertex z0 = g.center();
  double meet_time = 0.0, stages = 0.0;
  for (std::size_t r = 0; r < runs; ++r) {
    const int dist = 1 + static_cast<int>(r % static_cast<std::size_t>(max_distance));
    std::vector<int> offset(static_cast<std::size_t>(d), 0);
    offset[0] = (dist + 1) / 2;
    if (d > 1) offset[1] = dist / 2;
    else offset[0] = dist;
    const Vertex z1 = g.translate(z0, offset);
    const std::uint64_t s = replica_seed(seed, r);
    LazyClockField clock(g.vertex_count(), s, t_end);
    const CouplingRun run = mirror_couple(g, z0, z1, clock, t_end, s);
    if (run.meeting_time) {
      ++sum.met;
      meet_time += *run.meeting_time;
      sum.meeting_times.push_back(*run.meeting_time);
    }
    if (run.suffix_equal) ++sum.suffix_equal;
    if (run.window_exceeded) ++sum.window_exceeded;
    stages += run.stages;
    sum.max_displacement = std::max({sum.max_displacement, run.displacement_max[0], run.displacement_max[1]});
  }
  sum.mean_meeting_time = sum.met ? meet_time / static_cast<double>(sum.met) : 0.0;
  sum.mean_stages = runs ? stages / static_cast<double>(runs) : 0.0;
  return sum;
}

std::vector<double> random_U_star(const Graph& g, double min_positive, std::uint64_t seed) {
  const int k = g.vertex_count();
  for (std::uint64_t attempt = 0;; ++attempt) {
    Stream s(derive_key(seed, StreamDomain::experiment, attempt), 0);
    std::vector<char> zero(static_cast<std::size_t>(k), 0);
    std::vector<Vertex> order(static_cast<std::size_t>(k));
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[s.below(i)]);
    for (Vertex v : order) {
      const auto nb = g.neighbors(v);
      const bool free = std::none_of(nb.begin(), nb.end(), [&](Vertex u) { return zero[static_cast<std::size_t>(u)]; });
      if (free && (s.uniform() < 0.5 || v == order.front())) zero[static_cast<std::size_t>(v)] = 1;
    }
    std::vector<double> a(static_cast<std::size_t>(k), 0.0);
    double sum = 0.0;
    for (int v = 0; v < k; ++v)
      if (!zero[static_cast<std::size_t>(v)]) sum += a[static_cast<std::size_t>(v)] = 0.5 + s.uniform();
    double smallest = std::numeric_limits<double>::infinity();
    for (double& x : a) {
      x *= k / sum;
      if (x > 0.0) smallest = std::min(smallest, x);
    }
    if (smallest >= min_positive && in_U_star(a, g)) return a;
  }
}

std::vector<double> random_U(const Graph& g, std::uint64_t seed) {
  const int k = g.vertex_count();
  Stream s(seed, StreamDomain::initial_state, 2);
  std::vector<double> c(static_cast<std::size_t>(k));
  for (double& x : c) x = s.uniform() < 0.2 ? 0.0 : s.exponential();
  c[s.below(static_cast<std::uint64_t>(k))] = 0.0;
  double sum = 0.0;
  for (double x : c) sum += x;
  if (sum == 0.0) {
    c.assign(c.size(), 0.0);
    c[(s.below(static_cast<std::uint64_t>(k - 1)) + 1) % static_cast<std::uint64_t>(k)] = k;
    c[0] = 0.0;
    sum = k;
  }
  for (double& x : c) x *= k / sum;
  return c;
}

SupportTrial support_trial(const Graph& g, double eps1, std::size_t cap, std::uint64_t seed) {
  SupportTrial t;
  t.target = random_U_star(g, 2.5 * eps1, derive_key(seed, StreamDomain::experiment, 1));
  t.start = random_U(g, derive_key(seed, StreamDomain::experiment, 2));
  t.target_zeros = static_cast<std::size_t>(std::count(t.target.begin(), t.target.end(), 0.0));
  ReverseSequence seq(g, t.target, eps1);
  t.reach = reach_target(seq, t.start, 16, cap);
  const auto xs = seq.vertices();
  t.replay_error = l1_distance(forward_replay(g, seq.endpoint(), xs), t.target);
  return t;
}

}  // namespace meteor

// Command-line experiment runner.
//
//   meteor_cli <simulate|oracle|moments|flow|tracer|support|couple|verify> [flags]
//
// Flags may also come from a flat key=value file given with --config; flags
// on the command line win over the file. METEOR_SEED, when set, replaces the
// base seed from either source. Exit status: 0 all in-run checks passed,
// 1 a check failed or the run aborted, 2 usage error.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "meteor/experiment.hpp"

namespace fs = std::filesystem;
using namespace meteor;

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kUsage = 2;

std::ofstream open_output(const ExperimentConfig& c, const std::string& name) {
  fs::create_directories(c.output_dir);
  const fs::path p = fs::path(c.output_dir) / name;
  std::ofstream out(p, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::io_error, "cannot write " + p.string());
  out << c.header() << '\n';
  return out;
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

std::uint64_t burn_in_for(const ExperimentConfig& c, const Graph& g) {
  return c.burn_in ? c.burn_in : default_burn_in(g);
}
std::uint64_t gap_for(const ExperimentConfig& c, const Graph& g) { return c.gap ? c.gap : default_gap(g); }

int run_simulate(const ExperimentConfig& c) {
  const Graph g = build_graph(c);
  const MassState s0 = initial_state(g, parse_initial_law(c.initial), c.seed);
  const EventLog log = EventLog::sample(g.vertex_count(), c.horizon, c.seed);
  const MassState st = simulate(g, s0, log, c.horizon);
  {
    auto out = open_output(c, "state.csv");
    write_state_csv(out, st);
  }
  if (c.walks > 0) {
    const WimpRun run = run_wimps(g, s0, log, c.walks, c.horizon, c.seed, true);
    auto out = open_output(c, "wimps.csv");
    write_trajectories_csv(out, run);
  }
  const double drift = std::abs(st.total() - s0.total()) / std::max(1.0, s0.total());
  std::cout << c.header() << '\n'
            << "graph " << g.describe() << ", events " << log.total_events() << ", total mass "
            << fmt(st.total()) << ", relative drift " << fmt(drift) << '\n';
  return drift < 1e-9 ? kOk : kCheckFailed;
}

int run_oracle(const ExperimentConfig& c) {
  const Graph g = build_graph(c);
  const MassState s0 = initial_state(g, parse_initial_law(c.initial), c.seed);
  const EventLog log = EventLog::sample(g.vertex_count(), c.horizon, c.seed);
  const OracleComparison cmp = oracle_compare(g, s0, log, c.horizon);
  auto out = open_output(c, "oracle.csv");
  out << "vertex,simulated,oracle\n";
  for (std::size_t x = 0; x < cmp.simulated.size(); ++x)
    out << x << ',' << fmt(cmp.simulated[x]) << ',' << fmt(cmp.oracle[x]) << '\n';
  const bool ok = cmp.max_relative_gap <= 1e-9;
  std::cout << c.header() << '\n'
            << "max relative gap " << fmt(cmp.max_relative_gap) << " at vertex " << cmp.worst_vertex
            << (ok ? "  OK" : "  MISMATCH") << '\n';
  return ok ? kOk : kCheckFailed;
}

int run_moments(const ExperimentConfig& c) {
  const Graph g = build_graph(c);
  const auto runs = replica_moment_runs(g, parse_initial_law(c.initial), c.replicas, burn_in_for(c, g), c.samples,
                                        gap_for(c, g), c.seed, c.box_sides, c.threads);
  MomentReport rep = moment_report(std::span<const ReplicaMoments>(runs), g, c.box_sides);
  rep.burn_in_events = burn_in_for(c, g);
  rep.gap_events = gap_for(c, g);
  {
    auto out = open_output(c, "moments.csv");
    write_report_csv(out, rep);
  }
  {
    fs::create_directories(c.output_dir);
    std::ofstream out(fs::path(c.output_dir) / "moments.json", std::ios::binary);
    out << report_json(rep, c.to_json()) << '\n';
  }
  std::cout << c.header() << '\n';
  write_report_csv(std::cout, rep);
  return rep.passed() ? kOk : kCheckFailed;
}

int run_flow(const ExperimentConfig& c) {
  require(c.topology == "cycle", ErrorKind::invalid_parameter, "flow runs on a cycle");
  const Graph g = build_graph(c);
  const FlowVariance fv = flow_variance(c.side, c.times, c.replicas, burn_in_for(c, g), c.seed, c.threads);
  auto out = open_output(c, "flow.csv");
  out << "t,var_shift_averaged,ci,var_plain,ci_plain,bound,pass\n";
  bool ok = fv.worst_telescoping < 1e-9;
  for (std::size_t i = 0; i < fv.times.size(); ++i) {
    const auto& e = fv.shift_averaged[i];
    const bool pass = e.value - e.ci <= 2.0;
    ok = ok && pass;
    out << fmt(fv.times[i]) << ',' << fmt(e.value) << ',' << fmt(e.ci) << ',' << fmt(fv.plain[i].value) << ','
        << fmt(fv.plain[i].ci) << ",2," << (pass ? 1 : 0) << '\n';
  }
  std::cout << c.header() << '\n' << "worst telescoping residual " << fmt(fv.worst_telescoping) << '\n';
  for (std::size_t i = 0; i < fv.times.size(); ++i)
    std::cout << "t=" << fv.times[i] << " Var F^0 = " << fmt(fv.shift_averaged[i].value) << " +- "
              << fmt(fv.shift_averaged[i].ci) << '\n';
  return ok ? kOk : kCheckFailed;
}

int run_tracer(const ExperimentConfig& c) {
  require(c.topology == "cycle", ErrorKind::invalid_parameter, "tracer runs on a cycle");
  const Graph g = build_graph(c);
  const TracerRun tr =
      tracer_displacements(c.side, c.times, c.labels, c.replicas, burn_in_for(c, g), c.seed, c.threads);
  auto out = open_output(c, "tracer.csv");
  out << "t,m,estimate,lower,upper,bound,pass\n";
  bool ok = tr.order_preserved;
  for (std::size_t i = 0; i < tr.times.size(); ++i)
    for (double m : c.tail_m) {
      const TailEstimate te = tail_estimate(tr.displacement[i], m);
      const double bound = 24.0 / (m * m);
      const bool pass = te.upper <= bound;
      ok = ok && pass;
      out << fmt(tr.times[i]) << ',' << fmt(m) << ',' << fmt(te.estimate) << ',' << fmt(te.lower) << ','
          << fmt(te.upper) << ',' << fmt(bound) << ',' << (pass ? 1 : 0) << '\n';
    }
  auto mom = open_output(c, "tracer_moment.csv");
  mom << "t,moment_1_5,ci\n";
  for (std::size_t i = 0; i < tr.times.size(); ++i)
    mom << fmt(tr.times[i]) << ',' << fmt(tr.moment_15[i].value) << ',' << fmt(tr.moment_15[i].ci) << '\n';
  std::cout << c.header() << '\n' << "order preserved: " << (tr.order_preserved ? "yes" : "NO") << '\n';
  return ok ? kOk : kCheckFailed;
}

int run_support(const ExperimentConfig& c) {
  const Graph g = build_graph(c);
  auto out = open_output(c, "support.csv");
  out << "trial,target_zeros,steps,distance,threshold,replay_error,reached\n";
  bool ok = true;
  for (std::size_t r = 0; r < c.replicas; ++r) {
    const SupportTrial t = support_trial(g, c.eps, c.step_cap, replica_seed(c.seed, r));
    ok = ok && t.reach.reached;
    out << r << ',' << t.target_zeros << ',' << t.reach.steps << ',' << fmt(t.reach.distance) << ','
        << fmt(2 * c.eps) << ',' << fmt(t.replay_error) << ',' << (t.reach.reached ? 1 : 0) << '\n';
    std::cout << "trial " << r << ": L1 distance " << fmt(t.reach.distance) << " after " << t.reach.steps
              << " steps" << (t.reach.reached ? "" : "  NOT REACHED") << '\n';
  }
  return ok ? kOk : kCheckFailed;
}

int run_couple(const ExperimentConfig& c) {
  const CouplingSummary s = coupling_experiment(c.dimension, c.side, c.distance, c.replicas, c.horizon, c.seed);
  auto out = open_output(c, "couple.csv");
  out << "dimension,side,runs,met,suffix_equal,window_exceeded,mean_meeting_time,mean_stages,max_displacement\n"
      << s.dimension << ',' << s.side << ',' << s.runs << ',' << s.met << ',' << s.suffix_equal << ','
      << s.window_exceeded << ',' << fmt(s.mean_meeting_time) << ',' << fmt(s.mean_stages) << ','
      << s.max_displacement << '\n';
  std::cout << c.header() << '\n'
            << "met " << s.met << "/" << s.runs << " before t=" << c.horizon << ", suffix equal " << s.suffix_equal
            << ", window exceeded " << s.window_exceeded << '\n';
  return s.suffix_equal == s.runs ? kOk : kCheckFailed;
}

int run_verify(const ExperimentConfig& c) {
  auto out = open_output(c, "verify.csv");
  out << "d,equation,lhs,rhs,holds\n";
  bool ok = true;
  for (int d = 1; d <= c.d_max; ++d) {
    const PrimeCheck pc = verify_prime_solution(d);
    ok = ok && pc.passed;
    for (const auto& e : pc.equations)
      out << d << ',' << e.name << ',' << e.lhs << ',' << e.rhs << ',' << (e.holds ? 1 : 0) << '\n';
    std::cout << "d=" << d << (pc.passed ? " all identities hold" : " FAILED") << '\n';
  }
  return ok ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Meteor process simulator and verification runner"};
  app.set_config("--config", "", "flat key=value configuration file");
  app.require_subcommand(1);
  app.fallthrough();

  ExperimentConfig c;
  app.add_option("--topology", c.topology, "cycle | torus | window | edges")
      ->check(CLI::IsMember({"cycle", "torus", "window", "edges"}));
  app.add_option("--side", c.side, "side length k")->check(CLI::PositiveNumber);
  app.add_option("--dimension,-d", c.dimension, "lattice dimension")->check(CLI::Range(1, 8));
  app.add_option("--edges-file", c.edges_file, "edge list for --topology edges");
  app.add_option("--initial", c.initial, "flat | atom | iid-exponential | zero-or-two");
  app.add_option("--horizon", c.horizon, "time horizon")->check(CLI::NonNegativeNumber);
  app.add_option("--seed", c.seed, "base seed");
  app.add_option("--replicas", c.replicas, "independent replicas or trials");
  app.add_option("--samples", c.samples, "states kept per replica");
  app.add_option("--burn-in", c.burn_in, "burn-in events (0: 200 |V|)");
  app.add_option("--gap", c.gap, "events between kept states (0: 5 |V|)");
  app.add_option("--times", c.times, "flow and tracer times")->delimiter(',');
  app.add_option("--tail-m", c.tail_m, "tracer tail levels")->delimiter(',');
  app.add_option("--box-sides", c.box_sides, "box sides for block variance")->delimiter(',');
  app.add_option("--eps", c.eps, "support tolerance eps1")->check(CLI::PositiveNumber);
  app.add_option("--step-cap", c.step_cap, "support step cap");
  app.add_option("--walks", c.walks, "WIMPs recorded by simulate");
  app.add_option("--labels", c.labels, "tracer labels per replica");
  app.add_option("--distance", c.distance, "largest coupling start distance");
  app.add_option("--d-max", c.d_max, "largest dimension for verify")->check(CLI::Range(1, 64));
  app.add_option("--threads", c.threads, "worker threads (0: all cores)");
  app.add_option("--output-dir,-o", c.output_dir, "output directory");

  const std::vector<std::pair<std::string, std::string>> commands{
      {"simulate", "run the process on a sampled clock field and write the final state"},
      {"oracle", "compare the simulation against the path recursion at every vertex"},
      {"moments", "stationary moment report"},
      {"flow", "stationary flow variance on a cycle"},
      {"tracer", "tracer tail probabilities on a cycle"},
      {"support", "reverse sequence and forward replay towards random targets"},
      {"couple", "mirror coupling meeting statistics"},
      {"verify", "exact rational identities for d = 1..d-max"}};
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }
  if (const char* env = std::getenv("METEOR_SEED")) {
    try {
      c.seed = std::stoull(env);
    } catch (const std::exception&) {
      std::cerr << "METEOR_SEED is not an unsigned integer\n";
      return kUsage;
    }
  }
  c.command = app.get_subcommands().front()->get_name();

  try {
    if (c.command == "simulate") return run_simulate(c);
    if (c.command == "oracle") return run_oracle(c);
    if (c.command == "moments") return run_moments(c);
    if (c.command == "flow") return run_flow(c);
    if (c.command == "tracer") return run_tracer(c);
    if (c.command == "support") return run_support(c);
    if (c.command == "couple") return run_couple(c);
    return run_verify(c);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::invalid_parameter ? kUsage : kCheckFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kCheckFailed;
  }
}

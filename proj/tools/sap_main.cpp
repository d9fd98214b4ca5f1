// Command-line front end: solve / gossip / privacy / bench.
// Exit codes: 0 success, 2 validation error, 3 numerical failure.

#include <chrono>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "sap/experiment.hpp"

namespace {

using namespace sap;

void apply_overrides(ExperimentConfig& cfg, const std::vector<std::string>& sets) {
  for (const auto& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw ValidationError("--set expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
}

void write_outputs(const ExperimentResult& result, const std::string& out,
                   const std::string& plot, const std::string& title) {
  if (!out.empty()) {
    std::ofstream f(out);
    if (!f) throw ValidationError("cannot open output file " + out);
    result.trace.write_csv(f);
  }
  if (!plot.empty()) {
    std::ofstream f(plot);
    if (!f) throw ValidationError("cannot open plot file " + plot);
    f << emit_plot_script(result.trace, title);
  }
  std::cout << result.summary << '\n';
  if (!out.empty()) std::cout << "wrote " << out << '\n';
  if (!plot.empty()) std::cout << "wrote " << plot << '\n';
}

// Shared flags that map one-to-one onto config keys.
struct CommonArgs {
  std::string config_file;
  std::vector<std::string> sets;
  std::string out;
  std::string plot;
  long long seed = 42;
  int trials = 1;
  long long iters = 1000;
  double target = 0.0;
  long long record_every = 1;
};

void add_common(CLI::App* app, CommonArgs& args) {
  app->add_option("--config", args.config_file, "key=value config file");
  app->add_option("--set", args.sets, "override a config key (key=value)");
  app->add_option("--out", args.out, "CSV output path");
  app->add_option("--plot", args.plot, "gnuplot script output path");
  app->add_option("--seed", args.seed, "master seed");
  app->add_option("--trials", args.trials, "independent trials");
  app->add_option("--max-iters,--iters", args.iters, "iteration horizon");
  app->add_option("--target", args.target, "target relative error");
  app->add_option("--record-every", args.record_every, "record every k-th iteration");
}

ExperimentConfig base_config(const CommonArgs& args) {
  ExperimentConfig cfg;
  if (!args.config_file.empty()) cfg = ExperimentConfig::parse_file(args.config_file);
  cfg.set("seed", std::to_string(args.seed));
  cfg.set("trials", std::to_string(args.trials));
  cfg.set("max-iters", std::to_string(args.iters));
  cfg.set("target", std::to_string(args.target));
  cfg.set("record-every", std::to_string(args.record_every));
  return cfg;
}

int run_bench(const std::string& graph, const std::string& system, double target, int trials,
              long long iters, std::uint64_t seed) {
  using clock = std::chrono::steady_clock;
  std::cout << "configuration                median-iters  seconds\n";
  const auto row = [&](const std::string& label, ExperimentConfig cfg) {
    cfg.set("trials", std::to_string(trials));
    cfg.set("seed", std::to_string(seed));
    cfg.set("max-iters", std::to_string(iters));
    cfg.set("target", std::to_string(target));
    cfg.set("record-every", "1000000000");
    const auto start = clock::now();
    const ExperimentResult res = run_experiment(cfg);
    const double secs = std::chrono::duration<double>(clock::now() - start).count();
    std::vector<long long> finals;
    for (int t : res.trace.trials()) {
      const auto series = res.trace.series(t, "rel_err");
      finals.push_back(series.back().first);
    }
    std::sort(finals.begin(), finals.end());
    std::cout << label;
    for (std::size_t i = label.size(); i < 29; ++i) std::cout << ' ';
    std::cout << finals[finals.size() / 2] << "  " << secs << '\n';
  };
  if (!graph.empty()) {
    for (const auto& [label, protocol, beta] :
         std::vector<std::tuple<std::string, std::string, std::string>>{
             {"pairwise", "pairwise", "0"},
             {"mrk beta=0.3", "mrk", "0.3"},
             {"block tau=5", "block", "0"},
             {"acc option=2", "acc", "0"}}) {
      ExperimentConfig cfg;
      cfg.set("graph", graph);
      cfg.set("protocol", protocol);
      cfg.set("momentum.beta", beta);
      cfg.set("tau", "5");
      row(label, std::move(cfg));
    }
    return 0;
  }
  if (!system.empty()) {
    for (const char* beta : {"0", "0.3", "0.4", "0.5"}) {
      ExperimentConfig cfg;
      cfg.set("system", system);
      cfg.set("variant", "momentum");
      cfg.set("momentum.beta", beta);
      row(std::string("mRK beta=") + beta, std::move(cfg));
    }
    return 0;
  }
  throw ValidationError("bench: provide --graph or --system");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sketch-and-project solvers and randomized gossip simulators"};
  app.require_subcommand(1);

  CommonArgs solve_args, gossip_args, privacy_args;

  auto* solve = app.add_subcommand("solve", "run a solver variant on a linear system");
  std::string system_spec, rhs, sketch = "coordinate", probabilities = "row-norms";
  std::string variant = "basic";
  int tau = 2;
  double omega = 1.0, beta = 0.0, gamma = 0.0;
  std::string acc_option = "2";
  double acc_lambda = -1.0, acc_nu = -1.0;
  solve->add_option("--system", system_spec,
                    "matrix file or generator spec (gaussian:MxN[:seed], spd:MxN, sparse:MxN:g)")
      ->required();
  solve->add_option("--rhs", rhs, "right-hand-side vector file");
  solve->add_option("--sketch", sketch, "coordinate | block | gaussian");
  solve->add_option("--tau", tau, "block size");
  solve->add_option("--probabilities", probabilities, "row-norms | uniform | p1,p2,...");
  solve->add_option("--variant", variant,
                    "basic | momentum | smomentum | accelerated | inexact | dual");
  solve->add_option("--omega", omega, "relaxation parameter");
  solve->add_option("--beta", beta, "heavy-ball momentum");
  solve->add_option("--gamma", gamma, "stochastic momentum");
  solve->add_option("--acc-option", acc_option, "1 | 2");
  solve->add_option("--acc-lambda", acc_lambda, "Option One lambda");
  solve->add_option("--acc-nu", acc_nu, "Option Two nu");
  add_common(solve, solve_args);

  auto* gossip = app.add_subcommand("gossip", "simulate a gossip protocol on a network");
  std::string graph, protocol = "pairwise", weights = "uniform";
  double gomega = 1.0, gbeta = 0.0;
  int gtau = 2;
  std::string gacc_option = "2";
  gossip->add_option("--graph", graph, "generator spec or edge-list file")->required();
  gossip->add_option("--protocol", protocol,
                     "pairwise | laplacian | block | mrk | acc | dualrnm");
  gossip->add_option("--omega", gomega, "relaxation parameter");
  gossip->add_option("--beta", gbeta, "heavy-ball momentum");
  gossip->add_option("--tau", gtau, "edges per block draw");
  gossip->add_option("--acc-option", gacc_option, "1 | 2");
  gossip->add_option("--weights", weights, "uniform | degree | file:<path>");
  add_common(gossip, gossip_args);

  auto* privacy = app.add_subcommand("privacy", "privacy-preserving gossip oracles");
  std::string pgraph, oracle = "binary", schedule = "adaptive", phi = "const:0.5";
  double lambda = 0.0, a_scale = 0.0, r_bound = 0.0, epsilon = 0.01, sigma = 1.0;
  privacy->add_option("--graph", pgraph, "generator spec or edge-list file")->required();
  privacy->add_option("--oracle", oracle, "binary | gap | noise");
  privacy->add_option("--schedule", schedule,
                      "constant:l | invt:a | invsqrt:a | optimal:R,k | adaptive");
  privacy->add_option("--lambda", lambda, "shortcut for --schedule constant:<lambda>");
  privacy->add_option("--a", a_scale, "shortcut for --schedule invsqrt:<a>");
  privacy->add_option("--R", r_bound, "optimal-rule bound (with --iters as horizon)");
  privacy->add_option("--epsilon", epsilon, "gap oracle threshold");
  privacy->add_option("--sigma", sigma, "noise standard deviation");
  privacy->add_option("--phi", phi, "const:v | gamma:g");
  add_common(privacy, privacy_args);

  auto* bench = app.add_subcommand("bench", "head-to-head comparisons");
  std::string bench_graph, bench_system;
  double bench_target = 1e-6;
  int bench_trials = 5;
  long long bench_iters = 1000000;
  long long bench_seed = 42;
  bench->add_option("--graph", bench_graph, "compare gossip protocols on this network");
  bench->add_option("--system", bench_system, "compare momentum parameters on this system");
  bench->add_option("--target", bench_target, "target relative error");
  bench->add_option("--trials", bench_trials, "trials per configuration");
  bench->add_option("--max-iters", bench_iters, "iteration cap");
  bench->add_option("--seed", bench_seed, "master seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) {
      ExperimentConfig cfg = base_config(solve_args);
      cfg.set("mode", "solve");
      cfg.set("system", system_spec);
      if (!rhs.empty()) cfg.set("rhs", rhs);
      cfg.set("sketch.variant", sketch);
      cfg.set("sketch.tau", std::to_string(tau));
      cfg.set("sketch.probabilities", probabilities);
      cfg.set("variant", variant);
      cfg.set("omega", std::to_string(omega));
      cfg.set("momentum.beta", std::to_string(beta));
      cfg.set("momentum.gamma", std::to_string(gamma));
      cfg.set("acc.option", acc_option);
      cfg.set("acc.lambda", std::to_string(acc_lambda));
      cfg.set("acc.nu", std::to_string(acc_nu));
      apply_overrides(cfg, solve_args.sets);
      write_outputs(run_experiment(cfg), solve_args.out, solve_args.plot, "solve " + system_spec);
      return 0;
    }
    if (gossip->parsed()) {
      ExperimentConfig cfg = base_config(gossip_args);
      cfg.set("mode", "gossip");
      if (graph.find(':') == std::string::npos) cfg.set("graph.file", graph);
      cfg.set("graph", graph);
      cfg.set("protocol", protocol);
      cfg.set("omega", std::to_string(gomega));
      cfg.set("momentum.beta", std::to_string(gbeta));
      cfg.set("tau", std::to_string(gtau));
      cfg.set("acc.option", gacc_option);
      cfg.set("weights", weights);
      apply_overrides(cfg, gossip_args.sets);
      write_outputs(run_experiment(cfg), gossip_args.out, gossip_args.plot, "gossip " + graph);
      return 0;
    }
    if (privacy->parsed()) {
      ExperimentConfig cfg = base_config(privacy_args);
      cfg.set("mode", "privacy");
      if (pgraph.find(':') == std::string::npos) cfg.set("graph.file", pgraph);
      cfg.set("graph", pgraph);
      cfg.set("privacy.oracle", oracle);
      std::string sched = schedule;
      if (lambda > 0.0) sched = "constant:" + std::to_string(lambda);
      if (a_scale > 0.0) sched = "invsqrt:" + std::to_string(a_scale);
      if (r_bound > 0.0)
        sched = "optimal:" + std::to_string(r_bound) + "," + std::to_string(privacy_args.iters);
      cfg.set("privacy.schedule", sched);
      cfg.set("privacy.epsilon", std::to_string(epsilon));
      cfg.set("privacy.sigma", std::to_string(sigma));
      cfg.set("privacy.phi", phi);
      apply_overrides(cfg, privacy_args.sets);
      write_outputs(run_experiment(cfg), privacy_args.out, privacy_args.plot,
                    "privacy " + oracle + " " + pgraph);
      return 0;
    }
    if (bench->parsed())
      return run_bench(bench_graph, bench_system, bench_target, bench_trials, bench_iters,
                       static_cast<std::uint64_t>(bench_seed));
  } catch (const sap::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const sap::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  }
  return 0;
}

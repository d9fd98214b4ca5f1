#include "sap/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>
#include <thread>

#include "sap/io.hpp"

namespace sap {

ExperimentConfig ExperimentConfig::parse(std::istream& in) {
  ExperimentConfig c;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("config: expected key=value, got '" + line + "'");
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    c.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return c;
}

ExperimentConfig ExperimentConfig::parse_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ValidationError("config: cannot open " + path);
  return parse(f);
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  if (key.empty()) throw ValidationError("config: empty key");
  kv_[key] = value;
}

bool ExperimentConfig::has(const std::string& key) const { return kv_.count(key) != 0; }

std::string ExperimentConfig::get(const std::string& key) const {
  const auto it = kv_.find(key);
  if (it == kv_.end()) throw ValidationError("config: missing key '" + key + "'");
  return it->second;
}

std::string ExperimentConfig::get_or(const std::string& key, const std::string& fallback) const {
  const auto it = kv_.find(key);
  return it == kv_.end() ? fallback : it->second;
}

double ExperimentConfig::get_double(const std::string& key, double fallback) const {
  const auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    throw ValidationError("config: key '" + key + "' is not a number ('" + it->second + "')");
  }
}

long long ExperimentConfig::get_int(const std::string& key, long long fallback) const {
  const auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  try {
    return std::stoll(it->second);
  } catch (const std::exception&) {
    throw ValidationError("config: key '" + key + "' is not an integer ('" + it->second + "')");
  }
}

LinearSystem gaussian_system(int m, int n, std::uint64_t seed) {
  if (m < 1 || n < 1) throw ValidationError("gaussian_system: bad dimensions");
  Rng rng(seed);
  Matrix a(m, n);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = rng.normal();
  Vector z(n);
  for (Eigen::Index j = 0; j < n; ++j) z(j) = rng.normal();
  Vector b = a * z;
  return LinearSystem(std::move(a), std::move(b));
}

LinearSystem spd_system(int m, int n, std::uint64_t seed) {
  if (m < n || n < 1) throw ValidationError("spd_system: need m >= n >= 1");
  Rng rng(seed);
  Matrix p(m, n);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < n; ++j) p(i, j) = rng.normal();
  Matrix a = p.transpose() * p;
  a = 0.5 * (a + a.transpose());
  Vector z(n);
  for (Eigen::Index j = 0; j < n; ++j) z(j) = rng.normal();
  Vector b = a * z;
  return LinearSystem(a, std::move(b), SpdMatrix::dense(a));
}

LinearSystem sparse_row_system(int m, int n, int g, std::uint64_t seed) {
  if (m < 1 || n < 1 || g < 1 || g > n)
    throw ValidationError("sparse_row_system: need 1 <= g <= n");
  Rng rng(seed);
  Matrix a = Matrix::Zero(m, n);
  for (int i = 0; i < m; ++i) {
    const std::vector<int> cols = rng.subset(n, g);
    for (int j : cols) a(i, j) = rng.normal();
  }
  Vector z(n);
  for (Eigen::Index j = 0; j < n; ++j) z(j) = rng.normal();
  Vector b = a * z;
  return LinearSystem(std::move(a), std::move(b));
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

LinearSystem make_system(const std::string& spec, const std::string& rhs_path) {
  const auto parts = split(spec, ':');
  if (parts.size() >= 2 && (parts[0] == "gaussian" || parts[0] == "spd" || parts[0] == "sparse")) {
    const auto dims = split(parts[1], 'x');
    try {
      if (parts[0] == "gaussian") {
        if (dims.size() != 2) throw ValidationError("system spec: gaussian wants MxN");
        const std::uint64_t seed = parts.size() > 2 ? std::stoull(parts[2]) : 1u;
        return gaussian_system(std::stoi(dims[0]), std::stoi(dims[1]), seed);
      }
      if (parts[0] == "spd") {
        if (dims.size() != 2) throw ValidationError("system spec: spd wants MxN");
        const std::uint64_t seed = parts.size() > 2 ? std::stoull(parts[2]) : 1u;
        return spd_system(std::stoi(dims[0]), std::stoi(dims[1]), seed);
      }
      if (dims.size() != 2 || parts.size() < 3)
        throw ValidationError("system spec: sparse wants sparse:MxN:g[:seed]");
      const std::uint64_t seed = parts.size() > 3 ? std::stoull(parts[3]) : 1u;
      return sparse_row_system(std::stoi(dims[0]), std::stoi(dims[1]), std::stoi(parts[2]),
                               seed);
    } catch (const std::invalid_argument&) {
      throw ValidationError("system spec: bad number in '" + spec + "'");
    }
  }
  Matrix a = load_matrix_file(spec);
  if (!rhs_path.empty()) return LinearSystem(std::move(a), load_vector_file(rhs_path));
  // No right-hand side given: use b = A z with a fixed seeded z, keeping the
  // loaded matrix and a consistent system.
  Rng rng(7);
  Vector z(a.cols());
  for (Eigen::Index j = 0; j < z.size(); ++j) z(j) = rng.normal();
  Vector b = a * z;
  return LinearSystem(std::move(a), std::move(b));
}

SketchDistribution make_sketch(const ExperimentConfig& config, const LinearSystem& system) {
  const std::string variant = config.get_or("sketch.variant", "coordinate");
  const int m = static_cast<int>(system.rows());
  if (variant == "coordinate") {
    const std::string probs = config.get_or("sketch.probabilities", "row-norms");
    if (probs == "row-norms") return SketchDistribution::coordinate_row_norms(system);
    if (probs == "uniform") return SketchDistribution::uniform_coordinate(m);
    std::vector<double> p;
    for (const auto& tok : split(probs, ',')) p.push_back(std::stod(tok));
    return SketchDistribution::coordinate(std::move(p));
  }
  if (variant == "block")
    return SketchDistribution::uniform_block(m, static_cast<int>(config.get_int("sketch.tau", 2)));
  if (variant == "gaussian") return SketchDistribution::gaussian_vector(m);
  throw ValidationError("config: unknown sketch.variant '" + variant + "'");
}

namespace {

InexactnessSpec make_inexactness(const ExperimentConfig& config, const LinearSystem& system) {
  const std::string variant = config.get_or("inexact.variant", "structured");
  if (variant == "structured") {
    const std::string inner = config.get_or("inexact.inner", "cg");
    return InexactnessSpec::structured(
        inner == "cg" ? InnerSolverKind::CG : InnerSolverKind::SketchProject,
        static_cast<int>(config.get_int("inexact.r", 1)));
  }
  if (variant == "abstract") {
    const std::string sigma = config.get_or("inexact.sigma", "0");
    if (sigma.rfind("geometric:", 0) == 0) {
      const auto parts = split(sigma.substr(10), ',');
      if (parts.size() != 2) throw ValidationError("config: inexact.sigma=geometric:a,ratio");
      return InexactnessSpec::abstract_bounded(
          SigmaSchedule::geometric(std::stod(parts[0]), std::stod(parts[1])));
    }
    return InexactnessSpec::abstract_bounded(SigmaSchedule::constant(std::stod(sigma)));
  }
  if (variant == "norm") {
    const Vector x0 = Vector::Zero(system.cols());
    return InexactnessSpec::norm_proportional(config.get_double("inexact.q", 0.0),
                                              project_onto_solution_set(system, x0));
  }
  if (variant == "function")
    return InexactnessSpec::function_proportional(config.get_double("inexact.q", 0.1));
  throw ValidationError("config: unknown inexact.variant '" + variant + "'");
}

}  // namespace

SolverConfig make_solver_config(const ExperimentConfig& config, const LinearSystem& system) {
  SolverConfig sc;
  const std::string variant = config.get_or("variant", "basic");
  if (variant == "basic") {
    sc.variant = SolverVariant::Basic;
  } else if (variant == "momentum") {
    sc.variant = SolverVariant::Momentum;
  } else if (variant == "smomentum") {
    sc.variant = SolverVariant::StochasticMomentum;
  } else if (variant == "accelerated") {
    sc.variant = SolverVariant::Accelerated;
  } else if (variant == "inexact") {
    sc.variant = SolverVariant::Inexact;
    sc.inexact = std::make_shared<InexactnessSpec>(make_inexactness(config, system));
  } else if (variant == "dual") {
    sc.variant = SolverVariant::Dual;
  } else {
    throw ValidationError("config: unknown variant '" + variant + "'");
  }
  sc.omega = config.get_double("omega", 1.0);
  sc.beta = config.get_double("momentum.beta", 0.0);
  sc.gamma = config.get_double("momentum.gamma", 0.0);
  const std::string acc_option = config.get_or("acc.option", "2");
  sc.acc_option = (acc_option == "1" || acc_option == "one") ? AccOption::One : AccOption::Two;
  sc.acc_lambda = config.get_double("acc.lambda", -1.0);
  sc.acc_nu = config.get_double("acc.nu", -1.0);
  return sc;
}

int thread_count_from_env() {
  const char* env = std::getenv("SAP_THREADS");
  if (!env) return 1;
  const int n = std::atoi(env);
  return n >= 1 ? n : 1;
}

namespace {

// Run `trials` jobs on up to `workers` threads; job t writes its own Trace.
std::vector<Trace> parallel_trials(int trials, int workers,
                                   const std::function<Trace(int)>& job) {
  std::vector<Trace> results(static_cast<std::size_t>(trials));
  if (workers <= 1 || trials <= 1) {
    for (int t = 0; t < trials; ++t) results[static_cast<std::size_t>(t)] = job(t);
    return results;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int t = next.fetch_add(1); t < trials; t = next.fetch_add(1))
          results[static_cast<std::size_t>(t)] = job(t);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

GossipProtocol make_protocol(const ExperimentConfig& config) {
  const std::string name = config.get_or("protocol", "pairwise");
  const double omega = config.get_double("omega", 1.0);
  const double beta = config.get_double("momentum.beta", 0.0);
  const int tau = static_cast<int>(config.get_int("tau", 2));
  if (name == "pairwise") return GossipProtocol::pairwise(omega);
  if (name == "laplacian") return GossipProtocol::laplacian_node(omega);
  if (name == "block") return GossipProtocol::block(tau, omega, beta);
  if (name == "mrk") return GossipProtocol::pairwise_momentum(omega, beta);
  if (name == "acc") {
    const std::string opt = config.get_or("acc.option", "2");
    if (opt == "1" || opt == "one")
      return GossipProtocol::acc_gossip(AccOption::One, config.get_double("acc.lambda", -1.0));
    return GossipProtocol::acc_gossip(AccOption::Two, config.get_double("acc.nu", -1.0));
  }
  if (name == "dualrnm") return GossipProtocol::dual_rnm(tau);
  throw ValidationError("config: unknown protocol '" + name + "'");
}

Network make_gossip_network(const ExperimentConfig& config) {
  Network base = config.has("graph.file") ? load_network_file(config.get("graph.file"))
                                          : make_network(config.get("graph"));
  const std::string weights = config.get_or("weights", "uniform");
  if (weights == "uniform") return base;
  if (weights == "degree") {
    Vector w(base.node_count());
    for (int i = 0; i < base.node_count(); ++i) w(i) = base.degree(i);
    return Network(base.node_count(), base.edges(), std::move(w));
  }
  if (weights.rfind("file:", 0) == 0) {
    Vector w = load_vector_file(weights.substr(5));
    return Network(base.node_count(), base.edges(), std::move(w));
  }
  throw ValidationError("config: unknown weights '" + weights + "'");
}

Vector initial_values(const ExperimentConfig& config, int n, std::uint64_t seed) {
  const std::string init = config.get_or("init", "uniform");
  if (init.rfind("file:", 0) == 0) return load_vector_file(init.substr(5));
  Rng rng(seed ^ 0x5eedu);
  Vector c(n);
  if (init == "uniform") {
    for (int i = 0; i < n; ++i) c(i) = rng.uniform();
  } else if (init == "gaussian") {
    for (int i = 0; i < n; ++i) c(i) = rng.normal();
  } else {
    throw ValidationError("config: unknown init '" + init + "'");
  }
  return c;
}

StepsizeSchedule make_schedule(const std::string& spec) {
  const auto parts = split(spec, ':');
  if (parts[0] == "adaptive") return StepsizeSchedule::adaptive();
  if (parts.size() != 2) throw ValidationError("config: schedule wants kind:args");
  if (parts[0] == "constant") return StepsizeSchedule::constant(std::stod(parts[1]));
  if (parts[0] == "invt") return StepsizeSchedule::inv_t(std::stod(parts[1]));
  if (parts[0] == "invsqrt") return StepsizeSchedule::inv_sqrt_t(std::stod(parts[1]));
  if (parts[0] == "optimal") {
    const auto args = split(parts[1], ',');
    if (args.size() != 2) throw ValidationError("config: schedule optimal:R,k");
    return StepsizeSchedule::optimal(std::stod(args[0]), std::stoll(args[1]));
  }
  throw ValidationError("config: unknown schedule '" + spec + "'");
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  const std::string mode = config.get_or(
      "mode", config.has("privacy.oracle") ? "privacy" : (config.has("graph") ? "gossip" : "solve"));
  const int trials = static_cast<int>(config.get_int("trials", 1));
  if (trials < 1) throw ValidationError("config: trials must be >= 1");
  const std::uint64_t seed = static_cast<std::uint64_t>(config.get_int("seed", 42));
  const long long iters = config.get_int("max-iters", config.get_int("iters", 1000));
  const double target = config.get_double("target", 0.0);
  const long long record_every = config.get_int("record-every", 1);
  const int workers = static_cast<int>(config.get_int("threads", thread_count_from_env()));

  ExperimentResult result;
  if (mode == "solve") {
    const LinearSystem system = make_system(config.get("system"), config.get_or("rhs", ""));
    const SketchDistribution dist = make_sketch(config, system);
    const SolverConfig solver = make_solver_config(config, system);
    const Vector x0 = Vector::Zero(system.cols());
    const StopRule stop{iters, target};
    const auto job = [&](int t) {
      RunOptions opts;
      opts.record_every = record_every;
      opts.trial = t;
      return run(system, dist, solver, x0, stop, opts, Rng::for_trial(seed, t));
    };
    for (auto& tr : parallel_trials(trials, workers, job)) result.trace.append(tr);
    std::ostringstream s;
    s << "solve " << config.get("system") << " variant=" << config.get_or("variant", "basic")
      << " trials=" << trials;
    result.summary = s.str();
    return result;
  }
  if (mode == "gossip") {
    const Network net = make_gossip_network(config);
    const GossipProtocol protocol = make_protocol(config);
    const Vector c = initial_values(config, net.node_count(), seed);
    const GossipSchedule schedule{iters, target};
    const auto job = [&](int t) {
      GossipOptions opts;
      opts.record_every = record_every;
      opts.trial = t;
      Trace tr;
      GossipSim sim(net, protocol, c, Rng::for_trial(seed, t));
      const bool record_f =
          sim.distribution().kind() == SketchDistribution::Kind::Coordinate;
      const auto record = [&](long long k) {
        tr.add(t, k, "rel_err", sim.rel_error());
        if (record_f) tr.add(t, k, "f", sim.objective());
        tr.add(t, k, "mass", sim.mass());
      };
      record(0);
      while (sim.clock() < schedule.iterations) {
        sim.tick();
        const bool due =
            sim.clock() % opts.record_every == 0 || sim.clock() == schedule.iterations;
        if (due) record(sim.clock());
        if (schedule.target_rel_error > 0.0 && sim.rel_error() <= schedule.target_rel_error) {
          if (!due) record(sim.clock());
          break;
        }
      }
      return tr;
    };
    for (auto& tr : parallel_trials(trials, workers, job)) result.trace.append(tr);
    std::ostringstream s;
    s << "gossip " << config.get_or("graph", "file") << " protocol="
      << config.get_or("protocol", "pairwise") << " trials=" << trials;
    result.summary = s.str();
    return result;
  }
  if (mode == "privacy") {
    const Network net = make_gossip_network(config);
    PrivacyConfig pc;
    const std::string oracle = config.get("privacy.oracle");
    if (oracle == "binary") {
      pc.oracle = PrivacyConfig::Oracle::Binary;
      pc.schedule = make_schedule(config.get_or("privacy.schedule", "adaptive"));
    } else if (oracle == "gap") {
      pc.oracle = PrivacyConfig::Oracle::EpsilonGap;
      pc.epsilon = config.get_double("privacy.epsilon", 0.01);
    } else if (oracle == "noise") {
      pc.oracle = PrivacyConfig::Oracle::NoiseInsertion;
      const double sigma = config.get_double("privacy.sigma", 1.0);
      pc.sigma = Vector::Constant(net.node_count(), sigma);
      const std::string phi = config.get_or("privacy.phi", "const:0.5");
      const auto parts = split(phi, ':');
      if (parts.size() != 2) throw ValidationError("config: privacy.phi wants const:v or gamma:g");
      if (parts[0] == "const") {
        pc.phi = Vector::Constant(net.node_count(), std::stod(parts[1]));
      } else if (parts[0] == "gamma") {
        pc.phi = phi_threshold(net, std::stod(parts[1])).phi;
      } else {
        throw ValidationError("config: privacy.phi wants const:v or gamma:g");
      }
    } else {
      throw ValidationError("config: unknown privacy.oracle '" + oracle + "'");
    }
    const Vector c = initial_values(config, net.node_count(), seed);
    const auto job = [&](int t) {
      PrivacyOptions opts;
      opts.record_every = record_every;
      opts.trial = t;
      return simulate_privacy(net, pc, c, iters, seed + static_cast<std::uint64_t>(t) * 7919u,
                              opts);
    };
    for (auto& tr : parallel_trials(trials, workers, job)) result.trace.append(tr);
    std::ostringstream s;
    s << "privacy " << oracle << " on " << config.get_or("graph", "file")
      << " trials=" << trials;
    result.summary = s.str();
    return result;
  }
  throw ValidationError("config: unknown mode '" + mode + "'");
}

std::string emit_plot_script(
    const std::vector<std::pair<std::string, std::vector<std::pair<long long, double>>>>& curves,
    const std::string& title) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "set title '" << title << "'\n";
  out << "set xlabel 'iteration'\n";
  out << "set ylabel 'value'\n";
  out << "set logscale y\n";
  for (std::size_t i = 0; i < curves.size(); ++i) {
    out << "$data" << i << " << EOD\n";
    for (const auto& [k, v] : curves[i].second) out << k << ' ' << v << '\n';
    out << "EOD\n";
  }
  if (curves.empty()) {
    out << "plot NaN notitle\n";
    return out.str();
  }
  out << "plot ";
  for (std::size_t i = 0; i < curves.size(); ++i) {
    if (i) out << ", \\\n     ";
    out << "$data" << i << " using 1:2 with lines title '" << curves[i].first << "'";
  }
  out << '\n';
  return out.str();
}

std::string emit_plot_script(const Trace& trace, const std::string& title) {
  std::vector<std::pair<std::string, std::vector<std::pair<long long, double>>>> curves;
  std::vector<std::string> metrics;
  for (const auto& r : trace.records())
    if (std::find(metrics.begin(), metrics.end(), r.metric) == metrics.end())
      metrics.push_back(r.metric);
  for (const auto& m : metrics) curves.emplace_back(m, trace.mean_series(m));
  return emit_plot_script(curves, title);
}

}  // namespace sap

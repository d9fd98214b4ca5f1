#include "sap/privacy.hpp"

#include <cmath>

namespace sap {

StepsizeSchedule StepsizeSchedule::constant(double lambda) {
  if (!(lambda > 0.0)) throw ValidationError("stepsize: lambda must be positive");
  StepsizeSchedule s;
  s.kind = Kind::Constant;
  s.lambda0 = lambda;
  return s;
}

StepsizeSchedule StepsizeSchedule::inv_t(double a) {
  if (!(a > 0.0)) throw ValidationError("stepsize: scale must be positive");
  StepsizeSchedule s;
  s.kind = Kind::InvT;
  s.a = a;
  return s;
}

StepsizeSchedule StepsizeSchedule::inv_sqrt_t(double a) {
  if (!(a > 0.0)) throw ValidationError("stepsize: scale must be positive");
  StepsizeSchedule s;
  s.kind = Kind::InvSqrtT;
  s.a = a;
  return s;
}

StepsizeSchedule StepsizeSchedule::optimal(double r, long long horizon) {
  if (!(r > 0.0) || horizon < 1)
    throw ValidationError("stepsize: optimal rule needs R > 0 and a horizon");
  StepsizeSchedule s;
  s.kind = Kind::Optimal;
  s.r_bound = r;
  s.horizon = horizon;
  return s;
}

StepsizeSchedule StepsizeSchedule::adaptive() {
  StepsizeSchedule s;
  s.kind = Kind::Adaptive;
  return s;
}

double StepsizeSchedule::at(long long t) const {
  switch (kind) {
    case Kind::Constant:
      return lambda0;
    case Kind::InvT:
      return a / static_cast<double>(t + 1);
    case Kind::InvSqrtT:
      return a / std::sqrt(static_cast<double>(t + 1));
    case Kind::Optimal:
      return std::sqrt(r_bound / static_cast<double>(horizon + 1));
    case Kind::Adaptive:
      throw ValidationError("stepsize: adaptive rule depends on the state");
  }
  throw ValidationError("stepsize: unknown kind");
}

double binary_rate_bound(const StepsizeSchedule& schedule, long long k, double r) {
  if (k < 1) throw ValidationError("binary_rate_bound: k must be >= 1");
  if (!(r > 0.0)) throw ValidationError("binary_rate_bound: R must be positive");
  switch (schedule.kind) {
    case StepsizeSchedule::Kind::Constant:
      return r / (schedule.lambda0 * static_cast<double>(k + 1)) + schedule.lambda0;
    case StepsizeSchedule::Kind::Optimal:
      return 2.0 * std::sqrt(r / static_cast<double>(k + 1));
    case StepsizeSchedule::Kind::InvSqrtT: {
      const double a = schedule.a;
      return (r + a * a * (std::log(static_cast<double>(k) + 1.5) + std::log(2.0))) /
             (2.0 * a * (std::sqrt(static_cast<double>(k + 2)) - 1.0));
    }
    case StepsizeSchedule::Kind::InvT: {
      double alpha = 0.0, beta = 0.0;
      for (long long t = 0; t <= k; ++t) {
        const double l = schedule.at(t);
        alpha += l;
        beta += l * l;
      }
      return r / alpha + beta / alpha;
    }
    case StepsizeSchedule::Kind::Adaptive:
      throw ValidationError("binary_rate_bound: adaptive rule has a linear rate; "
                            "use adaptive_binary_rate");
  }
  throw ValidationError("binary_rate_bound: unknown schedule");
}

double adaptive_binary_rate(const Network& net) {
  const double m = static_cast<double>(net.edge_count());
  return 1.0 - algebraic_connectivity(net) / (2.0 * m * m);
}

PhiChoice phi_threshold(const Network& net, double gamma) {
  if (!(gamma > 0.0) || gamma > static_cast<double>(net.min_degree()))
    throw ValidationError("phi_threshold: need 0 < gamma <= min degree");
  PhiChoice choice;
  choice.phi.resize(net.node_count());
  for (int i = 0; i < net.node_count(); ++i)
    choice.phi(i) = std::sqrt(1.0 - gamma / static_cast<double>(net.degree(i)));
  choice.noise_dominated = gamma < algebraic_connectivity(net) / 2.0;
  return choice;
}

NoiseState::NoiseState(Vector sigma_in, Vector phi_in)
    : sigma(std::move(sigma_in)), phi(std::move(phi_in)) {
  if (sigma.size() != phi.size()) throw ValidationError("noise: sigma/phi length mismatch");
  if ((sigma.array() < 0.0).any()) throw ValidationError("noise: sigma must be >= 0");
  if ((phi.array() < 0.0).any() || (phi.array() >= 1.0).any())
    throw ValidationError("noise: phi must lie in [0,1)");
  times.assign(static_cast<std::size_t>(sigma.size()), 0);
  last = Vector::Zero(sigma.size());
}

namespace {

// phi^t with the t = 0 case pinned to 1 (phi may be zero).
double powi(double phi, long long t) {
  if (t == 0) return 1.0;
  return std::pow(phi, static_cast<double>(t));
}

}  // namespace

PrivacySim::PrivacySim(const Network& net, const PrivacyConfig& config, Vector c,
                       std::uint64_t seed)
    : net_(&net), config_(config), c_(std::move(c)), rng_(seed) {
  if (c_.size() != net.node_count())
    throw ValidationError("privacy: initial values must have one entry per node");
  x_ = c_;
  cbar_ = c_.mean();
  using Oracle = PrivacyConfig::Oracle;
  if (config_.oracle == Oracle::Binary || config_.oracle == Oracle::EpsilonGap) {
    y_ = Vector::Zero(net.edge_count());
    system_.emplace(incidence(net), Vector::Zero(net.edge_count()));
    d_star_ = dual_value(*system_, c_, dual_optimum(*system_, c_));
    if (config_.oracle == Oracle::EpsilonGap && !(config_.epsilon > 0.0))
      throw ValidationError("privacy: epsilon-gap oracle needs epsilon > 0");
  } else {
    if (config_.sigma.size() != net.node_count() || config_.phi.size() != net.node_count())
      throw ValidationError("privacy: noise insertion needs per-node sigma and phi");
    noise_.emplace(config_.sigma, config_.phi);
  }
}

const Vector& PrivacySim::edge_duals() const {
  if (y_.size() == 0) throw ValidationError("privacy: this oracle maintains no dual vector");
  return y_;
}

const NoiseState& PrivacySim::noise() const {
  if (!noise_) throw ValidationError("privacy: not a noise-insertion run");
  return *noise_;
}

double PrivacySim::distance_sq() const {
  return (x_ - Vector::Constant(x_.size(), cbar_)).squaredNorm();
}

double PrivacySim::dual_suboptimality() const {
  if (!system_) throw ValidationError("privacy: this oracle maintains no dual vector");
  return d_star_ - dual_value(*system_, c_, y_);
}

double PrivacySim::average_gap() const {
  return sum_edge_gaps(*net_, x_) / static_cast<double>(net_->edge_count());
}

double PrivacySim::delta_fraction(double eps) const { return sap::delta_fraction(*net_, x_, eps); }

double PrivacySim::stepsize(long long t) const {
  if (config_.schedule.kind == StepsizeSchedule::Kind::Adaptive)
    return sum_edge_gaps(*net_, x_) / (2.0 * static_cast<double>(net_->edge_count()));
  return config_.schedule.at(t);
}

void PrivacySim::tick() {
  const std::size_t e = rng_.uniform_index(static_cast<std::size_t>(net_->edge_count()));
  const auto& [i, j] = net_->edges()[e];
  using Oracle = PrivacyConfig::Oracle;
  switch (config_.oracle) {
    case Oracle::Binary: {
      const double lambda = stepsize(clock_);
      if (x_(i) < x_(j)) {
        x_(i) += lambda;
        x_(j) -= lambda;
        y_(static_cast<Eigen::Index>(e)) += lambda;
      } else {  // the x_i >= x_j branch fires on ties
        x_(i) -= lambda;
        x_(j) += lambda;
        y_(static_cast<Eigen::Index>(e)) -= lambda;
      }
      break;
    }
    case Oracle::EpsilonGap: {
      const double eps = config_.epsilon;
      if (x_(i) <= x_(j) - eps) {
        x_(i) += eps / 2.0;
        x_(j) -= eps / 2.0;
        y_(static_cast<Eigen::Index>(e)) += eps / 2.0;
      } else if (x_(j) <= x_(i) - eps) {
        x_(i) -= eps / 2.0;
        x_(j) += eps / 2.0;
        y_(static_cast<Eigen::Index>(e)) -= eps / 2.0;
      }
      break;
    }
    case Oracle::NoiseInsertion: {
      NoiseState& ns = *noise_;
      const double vi = rng_.normal() * ns.sigma(i);
      const double vj = rng_.normal() * ns.sigma(j);
      const double fresh_i = powi(ns.phi(i), ns.times[static_cast<std::size_t>(i)]) * vi;
      const double fresh_j = powi(ns.phi(j), ns.times[static_cast<std::size_t>(j)]) * vj;
      const double wi = fresh_i - ns.last(i);
      const double wj = fresh_j - ns.last(j);
      const double avg = (x_(i) + wi + x_(j) + wj) / 2.0;
      x_(i) = avg;
      x_(j) = avg;
      ns.last(i) = fresh_i;
      ns.last(j) = fresh_j;
      ++ns.times[static_cast<std::size_t>(i)];
      ++ns.times[static_cast<std::size_t>(j)];
      break;
    }
  }
  ++clock_;
}

namespace {

void expect_oracle(const PrivacySim& sim, PrivacyConfig::Oracle oracle, const char* name) {
  if (sim.oracle() != oracle)
    throw ValidationError(std::string(name) + ": simulation runs a different oracle");
}

}  // namespace

void binary_step(PrivacySim& sim) {
  expect_oracle(sim, PrivacyConfig::Oracle::Binary, "binary_step");
  sim.tick();
}

void epsilon_gap_step(PrivacySim& sim) {
  expect_oracle(sim, PrivacyConfig::Oracle::EpsilonGap, "epsilon_gap_step");
  sim.tick();
}

void noise_step(PrivacySim& sim) {
  expect_oracle(sim, PrivacyConfig::Oracle::NoiseInsertion, "noise_step");
  sim.tick();
}

double delta_fraction(const Network& net, const Vector& x, double eps) {
  if (!(eps > 0.0)) throw ValidationError("delta_fraction: eps must be positive");
  long long over = 0;
  for (const auto& [i, j] : net.edges())
    if (std::abs(x(i) - x(j)) >= eps) ++over;
  return static_cast<double>(over) / static_cast<double>(net.edge_count());
}

double sum_edge_gaps(const Network& net, const Vector& x) {
  double s = 0.0;
  for (const auto& [i, j] : net.edges()) s += std::abs(x(i) - x(j));
  return s;
}

Trace simulate_privacy(const Network& net, const PrivacyConfig& config, const Vector& c,
                       long long iterations, std::uint64_t seed, const PrivacyOptions& options) {
  PrivacySim sim(net, config, c, seed);
  const bool dual = config.oracle != PrivacyConfig::Oracle::NoiseInsertion;
  Trace trace;
  const auto record = [&](long long k) {
    trace.add(options.trial, k, "dist_sq", sim.distance_sq());
    trace.add(options.trial, k, "avg_gap", sim.average_gap());
    trace.add(options.trial, k, "mass", sim.mass());
    if (dual) trace.add(options.trial, k, "dual_subopt", sim.dual_suboptimality());
  };
  record(0);
  while (sim.clock() < iterations) {
    sim.tick();
    if (sim.clock() % options.record_every == 0 || sim.clock() == iterations)
      record(sim.clock());
  }
  return trace;
}

}  // namespace sap

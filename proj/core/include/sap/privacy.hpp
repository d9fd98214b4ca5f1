#ifndef SAP_PRIVACY_HPP
#define SAP_PRIVACY_HPP

#include "sap/gossip.hpp"

namespace sap {

// Stepsize rule lambda^t for the Binary Oracle.
struct StepsizeSchedule {
  enum class Kind { Constant, InvT, InvSqrtT, Optimal, Adaptive };
  Kind kind = Kind::Constant;
  double lambda0 = 0.0;   // Constant
  double a = 1.0;         // InvT / InvSqrtT scale
  double r_bound = 0.0;   // Optimal: R >= D(y*) - D(y^0)
  long long horizon = 0;  // Optimal: fixed k

  static StepsizeSchedule constant(double lambda);
  static StepsizeSchedule inv_t(double a);
  static StepsizeSchedule inv_sqrt_t(double a);
  static StepsizeSchedule optimal(double r, long long horizon);
  static StepsizeSchedule adaptive();

  // lambda^t for the non-adaptive rules.
  double at(long long t) const;
};

// U^k = (D(y*) - D(y^0))/alpha^k + beta^k/alpha^k for the schedule, with
// alpha^k = sum lambda^t and beta^k = sum (lambda^t)^2. R bounds the initial
// dual suboptimality. The adaptive rule has a linear rate instead; see
// adaptive_binary_rate.
double binary_rate_bound(const StepsizeSchedule& schedule, long long k, double r);

// 1 - alpha(G) / (2 m^2), the linear factor of the adaptive-stepsize theorem.
double adaptive_binary_rate(const Network& net);

// Per-node noise-decay rates phi_i = sqrt(1 - gamma/d_i), gamma <= d_min.
struct PhiChoice {
  Vector phi;
  // true when gamma < alpha(G)/2, i.e. the combined rate is driven by the
  // noise decay rather than by the gossip rate.
  bool noise_dominated = false;
};
PhiChoice phi_threshold(const Network& net, double gamma);

// Per-node state of the controlled-noise protocol.
struct NoiseState {
  Vector sigma;       // initial standard deviations
  Vector phi;         // decay rates in [0,1)
  std::vector<long long> times;  // t_i: how often node i has injected noise
  Vector last;        // phi_i^{t_i - 1} v_i^{t_i - 1}, zero before first firing

  NoiseState(Vector sigma, Vector phi);
};

struct PrivacyConfig {
  enum class Oracle { Binary, EpsilonGap, NoiseInsertion };
  Oracle oracle = Oracle::Binary;
  StepsizeSchedule schedule;  // Binary
  double epsilon = 0.0;       // EpsilonGap
  Vector sigma;               // NoiseInsertion
  Vector phi;                 // NoiseInsertion
};

// Asynchronous privacy-preserving gossip on the incidence AC system (B = I).
// Binary and epsilon-gap maintain the dual edge vector alongside the primal.
class PrivacySim {
 public:
  PrivacySim(const Network& net, const PrivacyConfig& config, Vector c, std::uint64_t seed);

  void tick();
  long long clock() const { return clock_; }

  const Vector& values() const { return x_; }
  const Vector& edge_duals() const;
  const NoiseState& noise() const;
  PrivacyConfig::Oracle oracle() const { return config_.oracle; }

  double consensus_value() const { return cbar_; }
  double mass() const { return x_.sum(); }
  // ||cbar 1 - x||^2
  double distance_sq() const;
  // D(y*) - D(y), recomputed from the maintained dual vector.
  double dual_suboptimality() const;
  // L^t = (1/m) sum_e |x_i - x_j|
  double average_gap() const;
  double delta_fraction(double eps) const;
  // lambda used at the given tick (adaptive rule evaluates the current state).
  double stepsize(long long t) const;

 private:
  const Network* net_;
  PrivacyConfig config_;
  Vector c_;
  Vector x_;
  Vector y_;  // edge duals (binary / gap)
  std::optional<NoiseState> noise_;
  std::optional<LinearSystem> system_;  // incidence system for dual values
  double cbar_ = 0.0;
  double d_star_ = 0.0;
  long long clock_ = 0;
  Rng rng_;
};

// Per-oracle steps; each checks the sim runs the matching oracle and
// advances one tick.
void binary_step(PrivacySim& sim);
void epsilon_gap_step(PrivacySim& sim);
void noise_step(PrivacySim& sim);

// Fraction of edges with |x_i - x_j| >= eps (the oracle's measure Delta).
double delta_fraction(const Network& net, const Vector& x, double eps);
// sum_e |x_i - x_j|
double sum_edge_gaps(const Network& net, const Vector& x);

struct PrivacyOptions {
  long long record_every = 1;
  int trial = 0;
};

// Records dist_sq, avg_gap, mass and (binary/gap) dual_subopt per tick.
Trace simulate_privacy(const Network& net, const PrivacyConfig& config, const Vector& c,
                       long long iterations, std::uint64_t seed,
                       const PrivacyOptions& options = {});

}  // namespace sap

#endif

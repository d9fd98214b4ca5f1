#ifndef SAP_RATES_HPP
#define SAP_RATES_HPP

#include "sap/linalg.hpp"

namespace sap {

// rho = 1 - omega (2 - omega) lambda_min^+ and the iteration count that
// pushes a rho-contracting quantity below epsilon.
struct RatePrediction {
  double rho = 0.0;
  long long iteration_bound(double epsilon) const;
};

RatePrediction predicted_rate(const Spectrum& spectrum, double omega);

// Largest beta with a1 + a2 < 1 for the given stepsize and spectrum.
double momentum_beta_bound(const Spectrum& spectrum, double omega);

// Constants of the heavy-ball L2 rate: E||x^k - x*||_B^2 <= q^k (1+delta) ...
struct MomentumRate {
  double a1 = 0.0;
  double a2 = 0.0;
  double q = 0.0;
  double delta = 0.0;
};

// Throws RateUndefinedError (carrying the admissible beta bound) when
// a1 + a2 >= 1.
MomentumRate momentum_rate(const Spectrum& spectrum, double omega, double beta);

// Same constants for the stochastic-momentum variant with parameter gamma
// (convention gamma = n beta); requires B = I, which the caller guarantees.
MomentumRate stochastic_momentum_rate(const Spectrum& spectrum, double omega, double gamma,
                                      Eigen::Index n);

bool momentum_admissible(const Spectrum& spectrum, double omega, double beta);

// Cost model of the momentum-vs-stochastic-momentum comparison. g is the
// expected number of nonzeros touched by one stochastic gradient.
struct ComplexityComparison {
  double ratio_small_beta = 0.0;  // 1 + n/g
  double cost_momentum = 0.0;     // (g+n) / (1-q(beta))
  double cost_stochastic = 0.0;   // g / (1-qbar(beta n))
};

ComplexityComparison smc_vs_mc_complexity(const Spectrum& spectrum, Eigen::Index n, double g,
                                          double beta);

// Rate 1 - (1 - theta^r) lambda_min^+ of the structured-inexactness theorem
// (unit stepsize).
double structured_rate(const Spectrum& spectrum, double theta, int r);

// Nesterov-accelerated parameter sets.
enum class AccOption { One, Two };

struct AccParams {
  AccOption option = AccOption::Two;
  // Option One state: lambda plus the running gamma recursion.
  double lambda = 0.0;
  int m = 0;
  // Option Two constants.
  double nu = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  // Option One per-step values, updated by advance_option_one().
  double gamma_prev = 0.0;
  double alpha_k = 0.0;
  double beta_k = 0.0;
  double gamma_k = 0.0;

  // Recompute (alpha_k, beta_k, gamma_k) for the next iteration (Option One).
  void advance_option_one();
};

// Option One: lambda in [0, lambda_min^+(A^T A)] = [0, m * lambda_min^+(W)].
AccParams acc_params_option_one(int m, double lambda, const Spectrum& spectrum_of_AtA);

// Option Two: 1 <= nu <= min(m, 1 / lambda_min^+(W)), W = A^T A / m.
AccParams acc_params_option_two(int m, double nu, const Spectrum& spectrum_of_W);

// Exact nu of the Option Two theory for a normalized matrix A: the largest
// generalized eigenvalue of (sum_i a_i a_i^T (A^T A)^dagger a_i a_i^T,
// A^T A / m) restricted to Range(A^T).
double acc_nu_exact(const Matrix& a);

}  // namespace sap

#endif

#include "sap/rates.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

namespace sap {

long long RatePrediction::iteration_bound(double epsilon) const {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw ValidationError("iteration_bound: epsilon must lie in (0,1)");
  return static_cast<long long>(std::ceil(std::log(1.0 / epsilon) / (1.0 - rho)));
}

RatePrediction predicted_rate(const Spectrum& spectrum, double omega) {
  if (!(omega > 0.0 && omega < 2.0))
    throw ValidationError("predicted_rate: omega must lie in (0,2)");
  return {1.0 - omega * (2.0 - omega) * spectrum.lambda_min_plus};
}

double momentum_beta_bound(const Spectrum& spectrum, double omega) {
  const double lmin = spectrum.lambda_min_plus;
  const double lmax = spectrum.lambda_max;
  const double s = 4.0 - omega * lmin + omega * lmax;
  return (-s + std::sqrt(s * s + 16.0 * omega * (2.0 - omega) * lmin)) / 8.0;
}

namespace {

MomentumRate rate_from_a1_a2(double a1, double a2, double beta_bound) {
  if (a1 + a2 >= 1.0)
    throw RateUndefinedError("momentum rate undefined: a1 + a2 = " + std::to_string(a1 + a2) +
                                 " >= 1; admissible momentum bound is " +
                                 std::to_string(beta_bound),
                             beta_bound);
  MomentumRate r;
  r.a1 = a1;
  r.a2 = a2;
  r.q = (a1 + std::sqrt(a1 * a1 + 4.0 * a2)) / 2.0;
  r.delta = r.q - a1;
  return r;
}

}  // namespace

MomentumRate momentum_rate(const Spectrum& spectrum, double omega, double beta) {
  if (!(omega > 0.0 && omega < 2.0))
    throw ValidationError("momentum_rate: omega must lie in (0,2)");
  if (beta < 0.0) throw ValidationError("momentum_rate: beta must be >= 0");
  const double lmin = spectrum.lambda_min_plus;
  const double lmax = spectrum.lambda_max;
  const double a1 = 1.0 + 3.0 * beta + 2.0 * beta * beta -
                    (omega * (2.0 - omega) + omega * beta) * lmin;
  const double a2 = beta + 2.0 * beta * beta + omega * beta * lmax;
  return rate_from_a1_a2(a1, a2, momentum_beta_bound(spectrum, omega));
}

MomentumRate stochastic_momentum_rate(const Spectrum& spectrum, double omega, double gamma,
                                      Eigen::Index n) {
  if (!(omega > 0.0 && omega < 2.0))
    throw ValidationError("stochastic_momentum_rate: omega must lie in (0,2)");
  if (gamma < 0.0) throw ValidationError("stochastic_momentum_rate: gamma must be >= 0");
  const double lmin = spectrum.lambda_min_plus;
  const double lmax = spectrum.lambda_max;
  const double dn = static_cast<double>(n);
  const double a1 = 1.0 + 3.0 * gamma / dn + 2.0 * gamma * gamma / dn -
                    (omega * (2.0 - omega) + omega * gamma / dn) * lmin;
  const double a2 = (gamma + 2.0 * gamma * gamma + omega * gamma * lmax) / dn;
  // Admissible range mirrors eq. for beta with the extra factor n under the
  // square root; report it scaled back to gamma.
  const double s = 4.0 - omega * lmin + omega * lmax;
  const double gamma_bound =
      (-s + std::sqrt(s * s + 16.0 * dn * omega * (2.0 - omega) * lmin)) / 8.0;
  return rate_from_a1_a2(a1, a2, gamma_bound);
}

bool momentum_admissible(const Spectrum& spectrum, double omega, double beta) {
  if (!(omega > 0.0 && omega < 2.0) || beta < 0.0) return false;
  return beta < momentum_beta_bound(spectrum, omega);
}

ComplexityComparison smc_vs_mc_complexity(const Spectrum& spectrum, Eigen::Index n, double g,
                                          double beta) {
  if (g < 1.0) throw ValidationError("smc_vs_mc_complexity: g must be >= 1");
  ComplexityComparison c;
  c.ratio_small_beta = 1.0 + static_cast<double>(n) / g;
  const MomentumRate qm = momentum_rate(spectrum, 1.0, beta);
  const MomentumRate qs = stochastic_momentum_rate(spectrum, 1.0, beta * static_cast<double>(n), n);
  c.cost_momentum = (g + static_cast<double>(n)) / (1.0 - qm.q);
  c.cost_stochastic = g / (1.0 - qs.q);
  return c;
}

double structured_rate(const Spectrum& spectrum, double theta, int r) {
  if (!(theta > 0.0 && theta < 1.0))
    throw ValidationError("structured_rate: theta must lie in (0,1)");
  if (r < 0) throw ValidationError("structured_rate: r must be >= 0");
  // r = 0: theta^0 = 1, no inner progress, rate 1.
  return 1.0 - (1.0 - std::pow(theta, r)) * spectrum.lambda_min_plus;
}

void AccParams::advance_option_one() {
  // gamma_k is the largest root of
  //   gamma^2 + gamma (lambda gamma_prev^2 - 1)/m - gamma_prev^2 = 0,
  // taken with the stable quadratic formula.
  const double b = (lambda * gamma_prev * gamma_prev - 1.0) / static_cast<double>(m);
  const double c = gamma_prev * gamma_prev;
  const double disc = std::sqrt(b * b + 4.0 * c);
  gamma_k = (b <= 0.0) ? (-b + disc) / 2.0 : (2.0 * c) / (b + disc);
  alpha_k = (static_cast<double>(m) - gamma_k * lambda) /
            (gamma_k * (static_cast<double>(m) * static_cast<double>(m) - lambda));
  beta_k = 1.0 - gamma_k * lambda / static_cast<double>(m);
  gamma_prev = gamma_k;
}

AccParams acc_params_option_one(int m, double lambda, const Spectrum& spectrum_of_AtA) {
  if (m < 1) throw ValidationError("acc_params: m must be >= 1");
  if (lambda < 0.0 || lambda > spectrum_of_AtA.lambda_min_plus * (1.0 + 1e-12))
    throw ValidationError("acc_params: Option One requires lambda in [0, lambda_min^+(A^T A)]");
  AccParams p;
  p.option = AccOption::One;
  p.lambda = lambda;
  p.m = m;
  p.gamma_prev = 0.0;
  p.advance_option_one();
  return p;
}

AccParams acc_params_option_two(int m, double nu, const Spectrum& spectrum_of_W) {
  if (m < 1) throw ValidationError("acc_params: m must be >= 1");
  const double lmin = spectrum_of_W.lambda_min_plus;
  const double hi = std::min(static_cast<double>(m), 1.0 / lmin);
  if (nu < 1.0 - 1e-12 || nu > hi * (1.0 + 1e-12))
    throw ValidationError("acc_params: Option Two requires 1 <= nu <= min(m, 1/lambda_min^+(W))");
  AccParams p;
  p.option = AccOption::Two;
  p.m = m;
  p.nu = nu;
  p.beta = 1.0 - std::sqrt(lmin / nu);
  p.gamma = std::sqrt(1.0 / (lmin * nu));
  p.alpha = 1.0 / (1.0 + p.gamma * nu);
  p.alpha_k = p.alpha;
  p.beta_k = p.beta;
  p.gamma_k = p.gamma;
  return p;
}

double acc_nu_exact(const Matrix& a) {
  const Matrix gram = a.transpose() * a;
  const Matrix gram_pinv = pseudoinverse_sym(gram);
  Matrix p = Matrix::Zero(a.cols(), a.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const Vector ai = a.row(i).transpose();
    const Matrix outer = ai * ai.transpose();
    p.noalias() += outer * gram_pinv * outer;
  }
  const Matrix u = range_basis(a.transpose());
  const Matrix pr = u.transpose() * p * u;
  const Matrix cr = u.transpose() * (gram / static_cast<double>(a.rows())) * u;
  // Restricted to Range(A^T), C is positive definite; reduce the generalized
  // problem to an ordinary symmetric one via C^{-1/2}.
  Eigen::SelfAdjointEigenSolver<Matrix> ec(cr);
  if (ec.info() != Eigen::Success || ec.eigenvalues().minCoeff() <= 0.0)
    throw NumericalError("acc_nu_exact: restricted Gram matrix not positive definite");
  const Matrix cinv_sqrt = ec.eigenvectors() *
                           ec.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                           ec.eigenvectors().transpose();
  const Matrix sym = cinv_sqrt * pr * cinv_sqrt;
  Eigen::SelfAdjointEigenSolver<Matrix> ev(0.5 * (sym + sym.transpose()));
  return ev.eigenvalues().maxCoeff();
}

}  // namespace sap

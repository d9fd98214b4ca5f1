#include "sap/dual.hpp"

namespace sap {

double dual_value(const LinearSystem& system, const Vector& x0, const Vector& y) {
  const Vector u = system.A().transpose() * y;
  return (system.b() - system.A() * x0).dot(y) - 0.5 * system.B().inv_quad(u);
}

Vector primal_from_dual(const LinearSystem& system, const Vector& x0, const Vector& y) {
  return x0 + system.B().solve(system.A().transpose() * y);
}

Vector dual_optimum(const LinearSystem& system, const Vector& x0) {
  const Matrix& a = system.A();
  Matrix binv_at(a.cols(), a.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    binv_at.col(i) = system.B().solve(a.row(i).transpose());
  const Matrix g = a * binv_at;
  return pseudoinverse_sym(g) * (system.b() - a * x0);
}

void msdsa_apply(DualState& state, const LinearSystem& system, const Sketch& sketch, double omega,
                 double beta) {
  const Matrix& a = system.A();
  if (sketch.is_gaussian()) {
    const Vector u = a.transpose() * sketch.gaussian;
    const double denom = system.B().inv_quad(u);
    const double d = sketch.gaussian.dot(system.b()) - u.dot(state.phi_curr);
    const double lambda = (denom > 0.0) ? d / denom : 0.0;
    Vector y_next = state.y_curr + beta * (state.y_curr - state.y_prev);
    y_next += (omega * lambda) * sketch.gaussian;
    Vector phi_next = state.phi_curr + beta * (state.phi_curr - state.phi_prev);
    phi_next += (omega * lambda) * system.B().solve(u);
    state.y_prev = std::move(state.y_curr);
    state.y_curr = std::move(y_next);
    state.phi_prev = std::move(state.phi_curr);
    state.phi_curr = std::move(phi_next);
    ++state.iteration;
    return;
  }
  const Eigen::Index tau = static_cast<Eigen::Index>(sketch.rows.size());
  Matrix as(tau, a.cols());
  Vector d(tau);
  for (Eigen::Index k = 0; k < tau; ++k) {
    const int row = sketch.rows[static_cast<std::size_t>(k)];
    as.row(k) = a.row(row);
    d(k) = system.b()(row) - a.row(row).dot(state.phi_curr);
  }
  Matrix v(a.cols(), tau);
  for (Eigen::Index k = 0; k < tau; ++k) v.col(k) = system.B().solve(as.row(k).transpose());
  const Matrix m = as * v;
  const Vector lambda = least_norm_solve_sym(m, d);

  Vector y_next = state.y_curr + beta * (state.y_curr - state.y_prev);
  for (Eigen::Index k = 0; k < tau; ++k)
    y_next(sketch.rows[static_cast<std::size_t>(k)]) += omega * lambda(k);
  Vector phi_next = state.phi_curr + beta * (state.phi_curr - state.phi_prev);
  phi_next += omega * (v * lambda);

  state.y_prev = std::move(state.y_curr);
  state.y_curr = std::move(y_next);
  state.phi_prev = std::move(state.phi_curr);
  state.phi_curr = std::move(phi_next);
  ++state.iteration;
}

void sdsa_step(DualState& state, const LinearSystem& system, const SketchDistribution& dist,
               double omega, Rng& rng) {
  msdsa_apply(state, system, dist.draw(rng), omega, 0.0);
}

void msdsa_step(DualState& state, const LinearSystem& system, const SketchDistribution& dist,
                double omega, double beta, Rng& rng) {
  msdsa_apply(state, system, dist.draw(rng), omega, beta);
}

}  // namespace sap

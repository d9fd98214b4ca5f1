#include "sap/solver.hpp"

#include <cmath>
#include <iostream>

#include "sap/dual.hpp"
#include "sap/inexact.hpp"

namespace sap {

namespace kernel {

namespace {

// Residual and B^{-1}-weighted squared norm of one row, support only.
inline void row_residual(const Matrix& a, const Vector& b, const Vector& weights, const Vector& x,
                         int row, double& r, double& denom) {
  r = 0.0;
  denom = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    const double aij = a(row, j);
    if (aij == 0.0) continue;
    r += aij * x(j);
    denom += aij * (aij / weights(j));
  }
  r -= b(row);
}

}  // namespace

void row_update(Vector& x, const LinearSystem& system, int row, double omega) {
  const Matrix& a = system.A();
  if (system.B().is_diagonal()) {
    const Vector& w = system.B().diagonal_weights();
    double r, denom;
    row_residual(a, system.b(), w, x, row, r, denom);
    if (!(denom > 0.0)) return;
    const double step = omega * (r / denom);
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      const double aij = a(row, j);
      if (aij == 0.0) continue;
      x(j) -= step * (aij / w(j));
    }
    return;
  }
  const Vector u = system.B().solve(a.row(row).transpose());
  const double denom = a.row(row).dot(u);
  if (!(denom > 0.0)) return;
  const double r = a.row(row).dot(x) - system.b()(row);
  x -= (omega * (r / denom)) * u;
}

void row_update_momentum(Vector& x, Vector& x_prev, const LinearSystem& system, int row,
                         double omega, double beta) {
  const Matrix& a = system.A();
  if (system.B().is_diagonal()) {
    const Vector& w = system.B().diagonal_weights();
    double r, denom;
    row_residual(a, system.b(), w, x, row, r, denom);
    const double step = (denom > 0.0) ? omega * (r / denom) : 0.0;
    x_prev = x + beta * (x - x_prev);  // x^{k+1} built in the old buffer
    if (step != 0.0) {
      for (Eigen::Index j = 0; j < a.cols(); ++j) {
        const double aij = a(row, j);
        if (aij == 0.0) continue;
        x_prev(j) -= step * (aij / w(j));
      }
    }
    std::swap(x, x_prev);
    return;
  }
  const Vector u = system.B().solve(a.row(row).transpose());
  const double denom = a.row(row).dot(u);
  const double r = a.row(row).dot(x) - system.b()(row);
  const double step = (denom > 0.0) ? omega * (r / denom) : 0.0;
  x_prev = x + beta * (x - x_prev);
  if (step != 0.0) x_prev -= step * u;
  std::swap(x, x_prev);
}

namespace {

// Shared assembly of the small block system: V = B^{-1} A_C^T, lambda =
// (A_C B^{-1} A_C^T)^dagger (A_C x - b_C).
void block_direction(const LinearSystem& system, std::span<const int> rows, const Vector& x,
                     Matrix& v, Vector& lambda) {
  const Matrix& a = system.A();
  const Eigen::Index tau = static_cast<Eigen::Index>(rows.size());
  Matrix as(tau, a.cols());
  Vector d(tau);
  for (Eigen::Index k = 0; k < tau; ++k) {
    const int row = rows[static_cast<std::size_t>(k)];
    as.row(k) = a.row(row);
    d(k) = a.row(row).dot(x) - system.b()(row);
  }
  v.resize(a.cols(), tau);
  for (Eigen::Index k = 0; k < tau; ++k) v.col(k) = system.B().solve(as.row(k).transpose());
  const Matrix m = as * v;
  lambda = least_norm_solve_sym(m, d);
}

}  // namespace

void block_update(Vector& x, const LinearSystem& system, std::span<const int> rows, double omega) {
  Matrix v;
  Vector lambda;
  block_direction(system, rows, x, v, lambda);
  x -= omega * (v * lambda);
}

void block_update_momentum(Vector& x, Vector& x_prev, const LinearSystem& system,
                           std::span<const int> rows, double omega, double beta) {
  Matrix v;
  Vector lambda;
  block_direction(system, rows, x, v, lambda);
  x_prev = x + beta * (x - x_prev);
  x_prev -= omega * (v * lambda);
  std::swap(x, x_prev);
}

void gaussian_update(Vector& x, const LinearSystem& system, const Vector& coeffs, double omega) {
  const Vector u = system.A().transpose() * coeffs;
  const double denom = system.B().inv_quad(u);
  if (!(denom > 0.0)) return;
  const double r = u.dot(x) - coeffs.dot(system.b());
  x -= (omega * (r / denom)) * system.B().solve(u);
}

void row_update_stochastic_momentum(Vector& x, Vector& x_prev, const LinearSystem& system,
                                    int row, int ik, double omega, double gamma) {
  const Matrix& a = system.A();
  const Vector& b = system.b();
  double r = 0.0, denom = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    const double aij = a(row, j);
    if (aij == 0.0) continue;
    r += aij * x(j);
    denom += aij * aij;  // B = I
  }
  r -= b(row);
  const double step = (denom > 0.0) ? omega * (r / denom) : 0.0;
  const double mom = gamma * (x(ik) - x_prev(ik));
  x_prev = x;
  if (step != 0.0) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      const double aij = a(row, j);
      if (aij == 0.0) continue;
      x_prev(j) -= step * aij;
    }
  }
  x_prev(ik) += mom;
  std::swap(x, x_prev);
}

void acc_update(Vector& x, Vector& v, Vector& y, const LinearSystem& system, int row,
                double alpha_k, double beta_k, double gamma_k) {
  const Matrix& a = system.A();
  y = alpha_k * v + (1.0 - alpha_k) * x;
  double r = 0.0, denom = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    const double aij = a(row, j);
    if (aij == 0.0) continue;
    r += aij * y(j);
    denom += aij * aij;  // B = I for the accelerated theory
  }
  r -= system.b()(row);
  const double g = (denom > 0.0) ? r / denom : 0.0;
  v = beta_k * v + (1.0 - beta_k) * y;
  x = y;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    const double aij = a(row, j);
    if (aij == 0.0) continue;
    v(j) -= gamma_k * (g * aij);
    x(j) -= g * aij;
  }
}

void sketched_update(Vector& x, const LinearSystem& system, const Sketch& sketch, double omega) {
  if (sketch.is_gaussian()) {
    gaussian_update(x, system, sketch.gaussian, omega);
  } else if (sketch.rows.size() == 1) {
    row_update(x, system, sketch.rows[0], omega);
  } else {
    block_update(x, system, sketch.rows, omega);
  }
}

void sketched_update_momentum(Vector& x, Vector& x_prev, const LinearSystem& system,
                              const Sketch& sketch, double omega, double beta) {
  if (sketch.is_gaussian()) {
    const Vector u = system.A().transpose() * sketch.gaussian;
    const double denom = system.B().inv_quad(u);
    const double r = u.dot(x) - sketch.gaussian.dot(system.b());
    const double step = (denom > 0.0) ? omega * (r / denom) : 0.0;
    x_prev = x + beta * (x - x_prev);
    if (step != 0.0) x_prev -= step * system.B().solve(u);
    std::swap(x, x_prev);
  } else if (sketch.rows.size() == 1) {
    row_update_momentum(x, x_prev, system, sketch.rows[0], omega, beta);
  } else {
    block_update_momentum(x, x_prev, system, sketch.rows, omega, beta);
  }
}

}  // namespace kernel

namespace {

void warn_omega(double omega) {
  if (!(omega > 0.0 && omega < 2.0))
    std::cerr << "warning: omega = " << omega
              << " lies outside (0,2); convergence guarantees do not apply\n";
}

}  // namespace

void basic_step(SolverState& state, const LinearSystem& system, const SketchDistribution& dist,
                double omega) {
  const Sketch s = dist.draw(state.rng);
  state.x_prev = state.x_curr;
  kernel::sketched_update(state.x_curr, system, s, omega);
  ++state.iteration;
}

void momentum_step(SolverState& state, const LinearSystem& system, const SketchDistribution& dist,
                   double omega, double beta) {
  const Sketch s = dist.draw(state.rng);
  kernel::sketched_update_momentum(state.x_curr, state.x_prev, system, s, omega, beta);
  ++state.iteration;
}

void stochastic_momentum_step(SolverState& state, const LinearSystem& system,
                              const SketchDistribution& dist, double omega, double gamma) {
  if (!system.B().is_identity())
    throw ValidationError("stochastic momentum requires B = I (unsupported geometry)");
  const Sketch s = dist.draw(state.rng);
  const int ik = static_cast<int>(state.rng.uniform_index(static_cast<std::size_t>(system.cols())));
  if (s.is_gaussian() || s.rows.size() != 1)
    throw ValidationError("stochastic momentum is defined for coordinate sketches");
  kernel::row_update_stochastic_momentum(state.x_curr, state.x_prev, system, s.rows[0], ik, omega,
                                         gamma);
  ++state.iteration;
}

void acc_step(AccState& state, const LinearSystem& system, AccParams& params) {
  const int row = static_cast<int>(state.rng.uniform_index(static_cast<std::size_t>(system.rows())));
  kernel::acc_update(state.x, state.v, state.y, system, row, params.alpha_k, params.beta_k,
                     params.gamma_k);
  if (params.option == AccOption::One) params.advance_option_one();
  ++state.iteration;
}

LinearSystem normalize_rows(const LinearSystem& system) {
  if (!system.B().is_identity())
    throw ValidationError("normalize_rows: accelerated runs require B = I");
  Matrix a = system.A();
  Vector b = system.b();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const double norm = a.row(i).norm();
    if (norm <= 0.0) throw ValidationError("normalize_rows: zero row " + std::to_string(i));
    a.row(i) /= norm;
    b(i) /= norm;
  }
  return LinearSystem(std::move(a), std::move(b));
}

void CesaroAverage::add(const Vector& x) {
  ++count_;
  if (count_ == 1) {
    mean_ = x;
  } else {
    mean_ += (x - mean_) / static_cast<double>(count_);
  }
}

const Vector& CesaroAverage::mean() const {
  if (count_ == 0) throw ValidationError("CesaroAverage: no iterates added");
  return mean_;
}

namespace {

bool cheap_objective(const SketchDistribution& dist) {
  switch (dist.kind()) {
    case SketchDistribution::Kind::Coordinate:
      return true;
    case SketchDistribution::Kind::FixedSets:
      return dist.sets().size() <= 64;
    default:
      return false;
  }
}

}  // namespace

Trace run(const LinearSystem& system, const SketchDistribution& dist, const SolverConfig& config,
          const Vector& x0, const StopRule& stop, const RunOptions& options, Rng rng) {
  if (x0.size() != system.cols()) throw ValidationError("run: x0 has wrong length");
  warn_omega(config.omega);

  // Exactness is cheap to verify for finite small supports; detect and warn.
  if (dist.kind() == SketchDistribution::Kind::Coordinate ||
      dist.kind() == SketchDistribution::Kind::FixedSets) {
    if (!exactness_holds(system, dist))
      std::cerr << "warning: exactness fails for the supplied distribution; "
                   "the run may not converge to the projection of x0\n";
  }

  const Vector x_star = project_onto_solution_set(system, x0);
  const double err0 = [&] {
    const double e = system.B().inner(x0 - x_star, x0 - x_star);
    return e > 0.0 ? e : 1.0;
  }();
  const bool record_f = options.record_objective && cheap_objective(dist);

  Trace trace;
  const auto record = [&](long long k, const Vector& x) {
    const Vector diff = x - x_star;
    trace.add(options.trial, k, "rel_err", system.B().inner(diff, diff) / err0);
    if (record_f) trace.add(options.trial, k, "f", objective_value(system, dist, x));
    for (const auto& [name, hook] : options.hooks) trace.add(options.trial, k, name, hook(x, k));
  };

  const auto rel_error = [&](const Vector& x) {
    const Vector diff = x - x_star;
    return system.B().inner(diff, diff) / err0;
  };

  if (config.variant == SolverVariant::Accelerated) {
    const LinearSystem normalized = normalize_rows(system);
    const Spectrum spec_w = spectrum_of_matrix(
        (normalized.A().transpose() * normalized.A()) / static_cast<double>(normalized.rows()));
    AccParams params =
        config.acc_option == AccOption::One
            ? acc_params_option_one(
                  static_cast<int>(normalized.rows()),
                  config.acc_lambda >= 0.0
                      ? config.acc_lambda
                      : spec_w.lambda_min_plus * static_cast<double>(normalized.rows()),
                  spectrum_of_matrix(normalized.A().transpose() * normalized.A()))
            : acc_params_option_two(static_cast<int>(normalized.rows()),
                                    config.acc_nu >= 0.0
                                        ? config.acc_nu
                                        : static_cast<double>(normalized.rows()),
                                    spec_w);
    AccState state(x0, std::move(rng));
    record(0, state.x);
    while (state.iteration < stop.max_iterations) {
      acc_step(state, normalized, params);
      const bool due = state.iteration % options.record_every == 0 ||
                       state.iteration == stop.max_iterations;
      if (due) record(state.iteration, state.x);
      if (stop.target_rel_error > 0.0 && rel_error(state.x) <= stop.target_rel_error) {
        if (!due) record(state.iteration, state.x);
        break;
      }
    }
    return trace;
  }

  if (config.variant == SolverVariant::Dual) {
    DualState dual(static_cast<int>(system.rows()), x0);
    const Vector y_star = dual_optimum(system, x0);
    const double d_star = dual_value(system, x0, y_star);
    Vector x = primal_from_dual(system, x0, dual.y_curr);
    record(0, x);
    trace.add(options.trial, 0, "dual_subopt", d_star - dual_value(system, x0, dual.y_curr));
    long long k = 0;
    while (k < stop.max_iterations) {
      msdsa_step(dual, system, dist, config.omega, config.beta, rng);
      ++k;
      x = primal_from_dual(system, x0, dual.y_curr);
      const bool due = k % options.record_every == 0 || k == stop.max_iterations;
      if (due) {
        record(k, x);
        trace.add(options.trial, k, "dual_subopt", d_star - dual_value(system, x0, dual.y_curr));
      }
      if (stop.target_rel_error > 0.0 && rel_error(x) <= stop.target_rel_error) {
        if (!due) record(k, x);
        break;
      }
    }
    return trace;
  }

  SolverState state(x0, std::move(rng));
  record(0, state.x_curr);
  while (state.iteration < stop.max_iterations) {
    switch (config.variant) {
      case SolverVariant::Basic:
        basic_step(state, system, dist, config.omega);
        break;
      case SolverVariant::Momentum:
        momentum_step(state, system, dist, config.omega, config.beta);
        break;
      case SolverVariant::StochasticMomentum:
        stochastic_momentum_step(state, system, dist, config.omega, config.gamma);
        break;
      case SolverVariant::Inexact:
        if (!config.inexact) throw ValidationError("run: inexact variant needs a spec");
        ibasic_step(state, system, dist, config.omega, *config.inexact);
        break;
      default:
        throw ValidationError("run: unsupported variant");
    }
    const bool due =
        state.iteration % options.record_every == 0 || state.iteration == stop.max_iterations;
    if (due) record(state.iteration, state.x_curr);
    if (stop.target_rel_error > 0.0 && rel_error(state.x_curr) <= stop.target_rel_error) {
      if (!due) record(state.iteration, state.x_curr);
      break;
    }
  }
  return trace;
}

}  // namespace sap

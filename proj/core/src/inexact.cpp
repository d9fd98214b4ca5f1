#include "sap/inexact.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <functional>

namespace sap {

SigmaSchedule SigmaSchedule::constant(double sigma) {
  if (sigma < 0.0) throw ValidationError("sigma schedule: sigma must be >= 0");
  return {Kind::Constant, sigma, 1.0};
}

SigmaSchedule SigmaSchedule::geometric(double initial, double ratio) {
  if (initial < 0.0 || ratio < 0.0 || ratio > 1.0)
    throw ValidationError("sigma schedule: need initial >= 0 and ratio in [0,1]");
  return {Kind::Geometric, initial, ratio};
}

double SigmaSchedule::at(long long k) const {
  if (kind == Kind::Constant) return initial;
  return initial * std::pow(ratio, static_cast<double>(k));
}

InexactnessSpec InexactnessSpec::abstract_bounded(SigmaSchedule sigma) {
  InexactnessSpec s;
  s.variant = Variant::AbstractBounded;
  s.sigma = sigma;
  return s;
}

InexactnessSpec InexactnessSpec::norm_proportional(double q, Vector x_star, double rho) {
  if (q < 0.0) throw ValidationError("inexactness: q must be >= 0");
  if (rho >= 0.0 && !(q < 1.0 - std::sqrt(rho)))
    throw ValidationError("inexactness: need q < 1 - sqrt(rho) for linear convergence");
  InexactnessSpec s;
  s.variant = Variant::NormProportional;
  s.q = q;
  s.x_star = std::move(x_star);
  return s;
}

InexactnessSpec InexactnessSpec::function_proportional(double q) {
  if (q <= 0.0) throw ValidationError("inexactness: q must be > 0");
  InexactnessSpec s;
  s.variant = Variant::FunctionProportional;
  s.q = q;
  return s;
}

InexactnessSpec InexactnessSpec::structured(InnerSolverKind inner, int r) {
  if (r < 0) throw ValidationError("inexactness: inner iteration count must be >= 0");
  InexactnessSpec s;
  s.variant = Variant::StructuredInner;
  s.inner = inner;
  s.inner_iterations = r;
  return s;
}

Vector inner_cg(const Matrix& m, const Vector& d, int r) {
  if (m.rows() != m.cols() || m.rows() != d.size())
    throw ValidationError("inner_cg: dimension mismatch");
  Vector lambda = Vector::Zero(d.size());
  Vector res = d;  // residual of M lambda = d at lambda = 0
  Vector p = res;
  double rs_old = res.squaredNorm();
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  for (int it = 0; it < r; ++it) {
    if (rs_old <= 1e-28 * scale * scale) break;  // finite termination
    const Vector mp = m * p;
    const double curvature = p.dot(mp);
    if (curvature <= 1e-14 * scale * p.squaredNorm())
      throw NumericalError("inner_cg: matrix not positive definite; use the sketch-and-project inner solver");
    const double alpha = rs_old / curvature;
    lambda += alpha * p;
    res -= alpha * mp;
    const double rs_new = res.squaredNorm();
    p = res + (rs_new / rs_old) * p;
    rs_old = rs_new;
  }
  return lambda;
}

Vector inner_sketch_project(const Matrix& m, const Vector& d, int r, Rng& rng) {
  if (m.rows() != m.cols() || m.rows() != d.size())
    throw ValidationError("inner_sketch_project: dimension mismatch");
  const Eigen::Index q = m.rows();
  std::vector<double> probs(static_cast<std::size_t>(q));
  double total = 0.0;
  for (Eigen::Index i = 0; i < q; ++i) {
    probs[static_cast<std::size_t>(i)] = m.row(i).squaredNorm();
    total += probs[static_cast<std::size_t>(i)];
  }
  Vector lambda = Vector::Zero(q);
  if (total <= 0.0) return lambda;
  for (int it = 0; it < r; ++it) {
    const Eigen::Index j = static_cast<Eigen::Index>(rng.categorical(probs));
    const double denom = probs[static_cast<std::size_t>(j)];
    if (denom <= 0.0) continue;
    const double res = m.row(j).dot(lambda) - d(j);
    lambda -= (res / denom) * m.row(j).transpose();
  }
  return lambda;
}

namespace {

// S^T A, d = S^T (b - A x), V = B^{-1} (S^T A)^T and M = S^T A B^{-1} A^T S.
struct SketchSystem {
  Matrix as;
  Vector d;
  Matrix v;
  Matrix m;
};

SketchSystem assemble(const LinearSystem& system, const Sketch& sketch, const Vector& x) {
  if (sketch.is_gaussian())
    throw ValidationError("inexact methods: Gaussian sketches are not supported here");
  const Matrix& a = system.A();
  const Eigen::Index tau = static_cast<Eigen::Index>(sketch.rows.size());
  SketchSystem s;
  s.as.resize(tau, a.cols());
  s.d.resize(tau);
  for (Eigen::Index k = 0; k < tau; ++k) {
    const int row = sketch.rows[static_cast<std::size_t>(k)];
    s.as.row(k) = a.row(row);
    s.d(k) = system.b()(row) - a.row(row).dot(x);
  }
  s.v.resize(a.cols(), tau);
  for (Eigen::Index k = 0; k < tau; ++k) s.v.col(k) = system.B().solve(s.as.row(k).transpose());
  s.m = s.as * s.v;
  return s;
}

// Direction uniformly distributed on the unit B-sphere, scaled to norm sigma.
// A zero sigma consumes no randomness, so a zero-error run shares its stream
// with the exact method.
Vector b_sphere_error(const SpdMatrix& b, double sigma, Rng& rng) {
  if (sigma == 0.0) return Vector::Zero(b.size());
  Vector z(b.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
  const double nz = z.norm();
  if (nz <= 0.0) return Vector::Zero(b.size());
  return b.inv_sqrt_apply(z) * (sigma / nz);
}

Vector solve_inner(const InexactnessSpec& spec, const Matrix& m, const Vector& d, Rng& rng) {
  if (spec.inner == InnerSolverKind::CG) return inner_cg(m, d, spec.inner_iterations);
  return inner_sketch_project(m, d, spec.inner_iterations, rng);
}

}  // namespace

void ibasic_step(SolverState& state, const LinearSystem& system, const SketchDistribution& dist,
                 double omega, const InexactnessSpec& spec, InexactReport* report) {
  const Sketch sketch = dist.draw(state.rng);
  SketchSystem s = assemble(system, sketch, state.x_curr);
  const Vector lambda_exact = least_norm_solve_sym(s.m, s.d);
  const double f_value = 0.5 * s.d.dot(lambda_exact);

  Vector x_next = state.x_curr;
  Vector lambda_used = lambda_exact;
  Vector epsilon;
  if (spec.variant == InexactnessSpec::Variant::StructuredInner) {
    lambda_used = solve_inner(spec, s.m, s.d, state.rng);
    x_next += omega * (s.v * lambda_used);
    if (report) epsilon = omega * (s.v * (lambda_used - lambda_exact));
  } else {
    double sigma = 0.0;
    switch (spec.variant) {
      case InexactnessSpec::Variant::AbstractBounded:
        sigma = spec.sigma.at(state.iteration);
        break;
      case InexactnessSpec::Variant::NormProportional:
        if (spec.x_star.size() != state.x_curr.size())
          throw ValidationError("inexactness: NormProportional needs the x* reference");
        sigma = spec.q * system.B().norm(state.x_curr - spec.x_star);
        break;
      case InexactnessSpec::Variant::FunctionProportional:
        if (!(spec.q < std::sqrt(omega * (2.0 - omega))))
          throw ValidationError("inexactness: need q < sqrt(omega(2-omega))");
        sigma = spec.q * std::sqrt(std::max(0.0, 2.0 * f_value));
        break;
      default:
        break;
    }
    epsilon = b_sphere_error(system.B(), sigma, state.rng);
    x_next += omega * (s.v * lambda_exact);
    x_next += epsilon;
  }

  state.x_prev = std::move(state.x_curr);
  state.x_curr = std::move(x_next);
  ++state.iteration;
  if (report) {
    report->sketch = sketch;
    report->m = std::move(s.m);
    report->lambda_exact = lambda_exact;
    report->lambda_used = std::move(lambda_used);
    report->epsilon = std::move(epsilon);
    report->f_value = f_value;
  }
}

void isdsa_step(DualState& state, const LinearSystem& system, const SketchDistribution& dist,
                double omega, const InexactnessSpec& spec, Rng& rng, InexactReport* report) {
  const Sketch sketch = dist.draw(rng);
  SketchSystem s = assemble(system, sketch, state.phi_curr);
  const Vector lambda_exact = least_norm_solve_sym(s.m, s.d);
  const double f_value = 0.5 * s.d.dot(lambda_exact);

  Vector y_next = state.y_curr;
  Vector phi_next = state.phi_curr;
  Vector lambda_used = lambda_exact;
  Vector epsilon_dual = Vector::Zero(system.rows());
  Vector epsilon;

  if (spec.variant == InexactnessSpec::Variant::StructuredInner) {
    lambda_used = solve_inner(spec, s.m, s.d, rng);
    for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(sketch.rows.size()); ++k)
      y_next(sketch.rows[static_cast<std::size_t>(k)]) += omega * lambda_used(k);
    phi_next += omega * (s.v * lambda_used);
    if (report) {
      for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(sketch.rows.size()); ++k)
        epsilon_dual(sketch.rows[static_cast<std::size_t>(k)]) =
            omega * (lambda_used(k) - lambda_exact(k));
      epsilon = omega * (s.v * (lambda_used - lambda_exact));
    }
  } else {
    double sigma = 0.0;
    switch (spec.variant) {
      case InexactnessSpec::Variant::AbstractBounded:
        sigma = spec.sigma.at(state.iteration);
        break;
      case InexactnessSpec::Variant::NormProportional:
        if (spec.x_star.size() != state.phi_curr.size())
          throw ValidationError("inexactness: NormProportional needs the x* reference");
        sigma = spec.q * system.B().norm(state.phi_curr - spec.x_star);
        break;
      case InexactnessSpec::Variant::FunctionProportional:
        if (!(spec.q < std::sqrt(omega * (2.0 - omega))))
          throw ValidationError("inexactness: need q < sqrt(omega(2-omega))");
        sigma = spec.q * std::sqrt(std::max(0.0, 2.0 * f_value));
        break;
      default:
        break;
    }
    // Draw eps_d with || B^{-1} A^T eps_d ||_B = sigma.
    if (sigma > 0.0) {
      for (int attempt = 0; attempt < 16; ++attempt) {
        Vector z(system.rows());
        for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
        const Vector w = system.B().solve(system.A().transpose() * z);
        const double nw = system.B().norm(w);
        if (nw > 1e-300) {
          epsilon_dual = z * (sigma / nw);
          break;
        }
      }
    }
    epsilon = system.B().solve(system.A().transpose() * epsilon_dual);
    for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(sketch.rows.size()); ++k)
      y_next(sketch.rows[static_cast<std::size_t>(k)]) += omega * lambda_exact(k);
    y_next += epsilon_dual;
    phi_next += omega * (s.v * lambda_exact);
    phi_next += epsilon;
  }

  state.y_prev = std::move(state.y_curr);
  state.y_curr = std::move(y_next);
  state.phi_prev = std::move(state.phi_curr);
  state.phi_curr = std::move(phi_next);
  ++state.iteration;
  if (report) {
    report->sketch = sketch;
    report->m = std::move(s.m);
    report->lambda_exact = lambda_exact;
    report->lambda_used = std::move(lambda_used);
    report->epsilon = std::move(epsilon);
    report->epsilon_dual = std::move(epsilon_dual);
    report->f_value = f_value;
  }
}

namespace {

double inner_contraction(const Matrix& m, InnerSolverKind inner) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
  if (eig.info() != Eigen::Success) throw NumericalError("structured_theta: eigensolver failed");
  if (inner == InnerSolverKind::CG) {
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (lo <= 0.0)
      throw NumericalError("structured_theta: singular inner matrix; CG bound undefined");
    const double rk = std::sqrt(hi / lo);
    const double base = (rk - 1.0) / (rk + 1.0);
    return std::pow(base, 4);
  }
  // Inner sketch-and-project with squared-row-norm probabilities on
  // M lambda = d: W_inner = M^T M / ||M||_F^2.
  const Matrix w = (m.transpose() * m) / m.squaredNorm();
  const Spectrum s = spectrum_of_matrix(w);
  return 1.0 - s.lambda_min_plus;
}

}  // namespace

double structured_theta(const LinearSystem& system, const SketchDistribution& dist,
                        InnerSolverKind inner) {
  double theta = 0.0;
  Sketch s;
  const auto consider = [&](const std::vector<int>& rows) {
    s.rows = rows;
    Matrix as(static_cast<Eigen::Index>(rows.size()), system.cols());
    for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(rows.size()); ++k)
      as.row(k) = system.A().row(rows[static_cast<std::size_t>(k)]);
    Matrix v(system.cols(), as.rows());
    for (Eigen::Index k = 0; k < as.rows(); ++k)
      v.col(k) = system.B().solve(as.row(k).transpose());
    theta = std::max(theta, inner_contraction(as * v, inner));
  };
  switch (dist.kind()) {
    case SketchDistribution::Kind::Coordinate: {
      for (int i = 0; i < dist.row_count(); ++i)
        if (dist.probabilities()[static_cast<std::size_t>(i)] > 0.0) consider({i});
      return theta;
    }
    case SketchDistribution::Kind::FixedSets: {
      for (const auto& rows : dist.sets()) consider(rows);
      return theta;
    }
    case SketchDistribution::Kind::UniformBlock: {
      if (dist.support_size() > 200000)
        throw UnsupportedClosedFormError("structured_theta: block support too large to enumerate");
      const int m = dist.row_count();
      const int tau = dist.block_size();
      std::vector<int> c(static_cast<std::size_t>(tau));
      for (int i = 0; i < tau; ++i) c[static_cast<std::size_t>(i)] = i;
      while (true) {
        consider(c);
        int i = tau - 1;
        while (i >= 0 && c[static_cast<std::size_t>(i)] == m - tau + i) --i;
        if (i < 0) break;
        ++c[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < tau; ++j)
          c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j - 1)] + 1;
      }
      return theta;
    }
    case SketchDistribution::Kind::GaussianVector:
      throw UnsupportedClosedFormError("structured_theta: Gaussian support is continuous");
  }
  throw ValidationError("structured_theta: unknown distribution kind");
}

}  // namespace sap

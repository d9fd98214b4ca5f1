#include "sap/system.hpp"

#include <Eigen/QR>
#include <cmath>
#include <functional>

namespace sap {

namespace {

constexpr long long kEnumerationCap = 200000;

// Visit every tau-subset of {0..m-1} in lexicographic order.
void for_each_subset(int m, int tau, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> c(static_cast<std::size_t>(tau));
  for (int i = 0; i < tau; ++i) c[static_cast<std::size_t>(i)] = i;
  while (true) {
    fn(c);
    int i = tau - 1;
    while (i >= 0 && c[static_cast<std::size_t>(i)] == m - tau + i) --i;
    if (i < 0) break;
    ++c[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < tau; ++j)
      c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j - 1)] + 1;
  }
}

}  // namespace

LinearSystem::LinearSystem(Matrix a, Vector b, SpdMatrix geometry)
    : a_(std::move(a)), b_(std::move(b)), geometry_(std::move(geometry)) {
  validate();
}

LinearSystem::LinearSystem(Matrix a, Vector b)
    : a_(std::move(a)), b_(std::move(b)), geometry_(SpdMatrix::identity(a_.cols())) {
  validate();
}

void LinearSystem::validate() const {
  if (a_.rows() < 1 || a_.cols() < 1) throw ValidationError("system: A must be nonempty");
  if (b_.size() != a_.rows()) throw ValidationError("system: length of b must match rows of A");
  if (geometry_.size() != a_.cols()) throw ValidationError("system: B must be cols(A) x cols(A)");
  if (!is_finite(a_) || !is_finite(b_)) throw ValidationError("system: non-finite entries");
  if (!b_.isZero(0.0)) {
    const Vector x_ls = a_.colPivHouseholderQr().solve(b_);
    const double residual = (a_ * x_ls - b_).norm();
    const double budget = 1e-8 * std::max(1.0, b_.norm());
    if (residual > budget)
      throw InconsistencyError("system: inconsistent (least-squares residual " +
                                   std::to_string(residual) + ")",
                               residual);
  }
}

Matrix sketch_Z(const LinearSystem& system, const Sketch& sketch) {
  const Matrix& a = system.A();
  if (sketch.is_gaussian()) {
    const Vector u = a.transpose() * sketch.gaussian;
    const double denom = system.B().inv_quad(u);
    if (denom <= 0.0) return Matrix::Zero(a.cols(), a.cols());
    return (u * u.transpose()) / denom;
  }
  const Eigen::Index tau = static_cast<Eigen::Index>(sketch.rows.size());
  Matrix as(tau, a.cols());
  for (Eigen::Index k = 0; k < tau; ++k) as.row(k) = a.row(sketch.rows[static_cast<std::size_t>(k)]);
  Matrix v(a.cols(), tau);
  for (Eigen::Index k = 0; k < tau; ++k) v.col(k) = system.B().solve(as.row(k).transpose());
  const Matrix m = as * v;
  return as.transpose() * pseudoinverse_sym(m) * as;
}

Matrix expected_Z(const LinearSystem& system, const SketchDistribution& dist) {
  const Matrix& a = system.A();
  const Eigen::Index n = a.cols();
  Matrix ez = Matrix::Zero(n, n);
  switch (dist.kind()) {
    case SketchDistribution::Kind::Coordinate: {
      if (static_cast<Eigen::Index>(dist.probabilities().size()) != a.rows())
        throw ValidationError("expected_Z: distribution row count mismatch");
      for (Eigen::Index i = 0; i < a.rows(); ++i) {
        const double p = dist.probabilities()[static_cast<std::size_t>(i)];
        if (p == 0.0) continue;
        const Vector row = a.row(i).transpose();
        const double denom = system.B().inv_quad(row);
        if (denom <= 0.0) continue;
        ez.noalias() += (p / denom) * (row * row.transpose());
      }
      return ez;
    }
    case SketchDistribution::Kind::FixedSets: {
      Sketch s;
      for (std::size_t k = 0; k < dist.sets().size(); ++k) {
        s.rows = dist.sets()[k];
        ez += dist.probabilities()[k] * sketch_Z(system, s);
      }
      return ez;
    }
    case SketchDistribution::Kind::UniformBlock: {
      const long long count = dist.support_size();
      if (count > kEnumerationCap)
        throw UnsupportedClosedFormError(
            "expected_Z: block support too large to enumerate; use estimate_EZ");
      Sketch s;
      for_each_subset(static_cast<int>(a.rows()), dist.block_size(),
                      [&](const std::vector<int>& c) {
                        s.rows = c;
                        ez += sketch_Z(system, s);
                      });
      return ez / static_cast<double>(count);
    }
    case SketchDistribution::Kind::GaussianVector:
      throw UnsupportedClosedFormError(
          "expected_Z: no closed form for the Gaussian sketch; use estimate_EZ");
  }
  throw ValidationError("expected_Z: unknown distribution kind");
}

Matrix estimate_EZ(const LinearSystem& system, const SketchDistribution& dist,
                   long long samples, std::uint64_t seed) {
  if (samples < 1) throw ValidationError("estimate_EZ: samples must be >= 1");
  Rng rng(seed);
  Matrix acc = Matrix::Zero(system.cols(), system.cols());
  for (long long s = 0; s < samples; ++s) acc += sketch_Z(system, dist.draw(rng));
  return acc / static_cast<double>(samples);
}

Spectrum spectrum_of_W(const LinearSystem& system, const Matrix& expected_z) {
  Matrix w = system.B().sqrt_inv_sandwich(expected_z);
  w = 0.5 * (w + w.transpose());  // symmetrize roundoff
  return spectrum_of_matrix(w);
}

Spectrum spectrum_of_W(const LinearSystem& system, const SketchDistribution& dist) {
  return spectrum_of_W(system, expected_Z(system, dist));
}

Vector project_onto_solution_set(const LinearSystem& system, const Vector& x) {
  if (x.size() != system.cols()) throw ValidationError("projection: wrong iterate length");
  const Matrix& a = system.A();
  Matrix g(a.rows(), a.rows());
  {
    Matrix binv_at(a.cols(), a.rows());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      binv_at.col(i) = system.B().solve(a.row(i).transpose());
    g.noalias() = a * binv_at;
  }
  const Vector residual = a * x - system.b();
  const Vector mu = pseudoinverse_sym(g) * residual;
  return x - system.B().solve(a.transpose() * mu);
}

namespace {

Matrix nullspace_basis(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double top = sv.size() ? sv(0) : 0.0;
  const double tol = std::numeric_limits<double>::epsilon() *
                     static_cast<double>(std::max(m.rows(), m.cols())) * top;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) ++rank;
  return svd.matrixV().rightCols(m.cols() - rank);
}

}  // namespace

bool exactness_holds(const LinearSystem& system, const Matrix& expected_z) {
  const Matrix na = nullspace_basis(system.A());
  const Matrix nz = nullspace_basis(expected_z);
  if (na.cols() != nz.cols()) return false;
  const double scale_a = std::max(1.0, system.A().norm());
  const double scale_z = std::max(1.0, expected_z.norm());
  for (Eigen::Index j = 0; j < na.cols(); ++j)
    if ((expected_z * na.col(j)).norm() > 1e-8 * scale_z) return false;
  for (Eigen::Index j = 0; j < nz.cols(); ++j)
    if ((system.A() * nz.col(j)).norm() > 1e-8 * scale_a) return false;
  return true;
}

bool exactness_holds(const LinearSystem& system, const SketchDistribution& dist) {
  return exactness_holds(system, expected_Z(system, dist));
}

double stochastic_value(const LinearSystem& system, const Sketch& sketch, const Vector& x) {
  const Matrix& a = system.A();
  if (sketch.is_gaussian()) {
    const Vector u = a.transpose() * sketch.gaussian;
    const double denom = system.B().inv_quad(u);
    if (denom <= 0.0) return 0.0;
    const double d = sketch.gaussian.dot(a * x - system.b());
    return 0.5 * d * d / denom;
  }
  const Eigen::Index tau = static_cast<Eigen::Index>(sketch.rows.size());
  Matrix as(tau, a.cols());
  Vector d(tau);
  const Vector r = a * x - system.b();
  for (Eigen::Index k = 0; k < tau; ++k) {
    const int i = sketch.rows[static_cast<std::size_t>(k)];
    as.row(k) = a.row(i);
    d(k) = r(i);
  }
  Matrix v(a.cols(), tau);
  for (Eigen::Index k = 0; k < tau; ++k) v.col(k) = system.B().solve(as.row(k).transpose());
  const Matrix m = as * v;
  const Vector lambda = least_norm_solve_sym(m, d);
  return 0.5 * d.dot(lambda);
}

Vector stochastic_gradient(const LinearSystem& system, const Sketch& sketch, const Vector& x) {
  const Matrix& a = system.A();
  if (sketch.is_gaussian()) {
    const Vector u = a.transpose() * sketch.gaussian;
    const double denom = system.B().inv_quad(u);
    if (denom <= 0.0) return Vector::Zero(a.cols());
    const double d = sketch.gaussian.dot(a * x - system.b());
    return system.B().solve(u) * (d / denom);
  }
  const Eigen::Index tau = static_cast<Eigen::Index>(sketch.rows.size());
  Matrix as(tau, a.cols());
  Vector d(tau);
  const Vector r = a * x - system.b();
  for (Eigen::Index k = 0; k < tau; ++k) {
    const int i = sketch.rows[static_cast<std::size_t>(k)];
    as.row(k) = a.row(i);
    d(k) = r(i);
  }
  Matrix v(a.cols(), tau);
  for (Eigen::Index k = 0; k < tau; ++k) v.col(k) = system.B().solve(as.row(k).transpose());
  const Matrix m = as * v;
  const Vector lambda = least_norm_solve_sym(m, d);
  return system.B().solve(as.transpose() * lambda);
}

double objective_value(const LinearSystem& system, const SketchDistribution& dist,
                       const Vector& x) {
  switch (dist.kind()) {
    case SketchDistribution::Kind::Coordinate: {
      const Matrix& a = system.A();
      const Vector r = a * x - system.b();
      double f = 0.0;
      for (Eigen::Index i = 0; i < a.rows(); ++i) {
        const double p = dist.probabilities()[static_cast<std::size_t>(i)];
        if (p == 0.0) continue;
        const double denom = system.B().inv_quad(a.row(i).transpose());
        if (denom <= 0.0) continue;
        f += p * 0.5 * r(i) * r(i) / denom;
      }
      return f;
    }
    case SketchDistribution::Kind::FixedSets: {
      double f = 0.0;
      Sketch s;
      for (std::size_t k = 0; k < dist.sets().size(); ++k) {
        s.rows = dist.sets()[k];
        f += dist.probabilities()[k] * stochastic_value(system, s, x);
      }
      return f;
    }
    case SketchDistribution::Kind::UniformBlock: {
      const long long count = dist.support_size();
      if (count > kEnumerationCap)
        throw UnsupportedClosedFormError("objective_value: block support too large to enumerate");
      double f = 0.0;
      Sketch s;
      for_each_subset(static_cast<int>(system.rows()), dist.block_size(),
                      [&](const std::vector<int>& c) {
                        s.rows = c;
                        f += stochastic_value(system, s, x);
                      });
      return f / static_cast<double>(count);
    }
    case SketchDistribution::Kind::GaussianVector:
      throw UnsupportedClosedFormError("objective_value: no closed form for the Gaussian sketch");
  }
  throw ValidationError("objective_value: unknown distribution kind");
}

}  // namespace sap

#include "sap/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>

namespace sap {

bool is_finite(const Matrix& m) { return m.allFinite(); }
bool is_finite(const Vector& v) { return v.allFinite(); }

SpdMatrix SpdMatrix::identity(Eigen::Index n) {
  SpdMatrix b;
  b.n_ = n;
  b.diag_ = Vector::Ones(n);
  return b;
}

SpdMatrix SpdMatrix::diagonal(Vector weights) {
  if (weights.size() == 0) throw ValidationError("SpdMatrix: empty diagonal");
  if ((weights.array() <= 0.0).any() || !is_finite(weights))
    throw ValidationError("SpdMatrix: diagonal weights must be positive and finite");
  SpdMatrix b;
  b.n_ = weights.size();
  b.diag_ = std::move(weights);
  return b;
}

SpdMatrix SpdMatrix::dense(Matrix m) {
  if (m.rows() != m.cols() || m.rows() == 0) throw ValidationError("SpdMatrix: matrix must be square");
  if (!is_finite(m)) throw ValidationError("SpdMatrix: non-finite entries");
  const double scale = m.cwiseAbs().maxCoeff();
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, scale))
    throw ValidationError("SpdMatrix: matrix is not symmetric to 1e-12 relative");
  SpdMatrix b;
  b.n_ = m.rows();
  b.dense_ = std::move(m);
  return b;
}

bool SpdMatrix::is_identity() const {
  return is_diagonal() && (diag_.array() == 1.0).all();
}

Matrix SpdMatrix::to_matrix() const {
  if (is_diagonal()) return diag_.asDiagonal();
  return dense_;
}

void SpdMatrix::ensure_factorized() const {
  if (is_diagonal() || llt_) return;
  Eigen::LLT<Matrix> llt(dense_);
  if (llt.info() != Eigen::Success)
    throw ValidationError("SpdMatrix: matrix is not positive definite");
  llt_ = std::move(llt);
}

Vector SpdMatrix::solve(const Vector& v) const {
  if (is_diagonal()) return v.cwiseQuotient(diag_);
  ensure_factorized();
  return llt_->solve(v);
}

Vector SpdMatrix::apply(const Vector& v) const {
  if (is_diagonal()) return v.cwiseProduct(diag_);
  return dense_ * v;
}

double SpdMatrix::inner(const Vector& u, const Vector& v) const {
  if (is_diagonal()) return (u.array() * diag_.array() * v.array()).sum();
  return u.dot(dense_ * v);
}

double SpdMatrix::norm(const Vector& v) const { return std::sqrt(std::max(0.0, inner(v, v))); }

double SpdMatrix::inv_quad(const Vector& a) const {
  if (is_diagonal()) return (a.array().square() / diag_.array()).sum();
  ensure_factorized();
  return a.dot(llt_->solve(a));
}

const Matrix& SpdMatrix::inv_sqrt() const {
  if (!inv_sqrt_) {
    if (is_diagonal()) {
      inv_sqrt_ = Matrix(diag_.cwiseSqrt().cwiseInverse().asDiagonal());
    } else {
      Eigen::SelfAdjointEigenSolver<Matrix> eig(dense_);
      if (eig.info() != Eigen::Success) throw NumericalError("SpdMatrix: eigendecomposition failed");
      if (eig.eigenvalues().minCoeff() <= 0.0)
        throw ValidationError("SpdMatrix: matrix is not positive definite");
      inv_sqrt_ = eig.eigenvectors() *
                  eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                  eig.eigenvectors().transpose();
    }
  }
  return *inv_sqrt_;
}

Vector SpdMatrix::inv_sqrt_apply(const Vector& v) const {
  if (is_diagonal()) return v.cwiseQuotient(diag_.cwiseSqrt());
  return inv_sqrt() * v;
}

Matrix SpdMatrix::sqrt_inv_sandwich(const Matrix& m) const {
  if (is_diagonal()) {
    const Vector s = diag_.cwiseSqrt().cwiseInverse();
    return s.asDiagonal() * m * s.asDiagonal();
  }
  const Matrix& r = inv_sqrt();
  return r * m * r;
}

namespace {

double rank_threshold(Eigen::Index rows, Eigen::Index cols, double top) {
  return std::numeric_limits<double>::epsilon() *
         static_cast<double>(std::max(rows, cols)) * top;
}

}  // namespace

Matrix pseudoinverse(const Matrix& m) {
  if (!is_finite(m)) throw ValidationError("pseudoinverse: non-finite input");
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return Matrix::Zero(m.cols(), m.rows());
  const double tol = rank_threshold(m.rows(), m.cols(), sv(0));
  Vector inv = Vector::Zero(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) inv(i) = 1.0 / sv(i);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

Matrix pseudoinverse_sym(const Matrix& m) {
  if (!is_finite(m)) throw ValidationError("pseudoinverse_sym: non-finite input");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
  if (eig.info() != Eigen::Success) throw NumericalError("pseudoinverse_sym: eigensolver failed");
  const Vector& ev = eig.eigenvalues();
  const double tol = rank_threshold(m.rows(), m.cols(), ev.cwiseAbs().maxCoeff());
  Vector inv = Vector::Zero(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (std::abs(ev(i)) > tol) inv(i) = 1.0 / ev(i);
  return eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
}

Vector least_norm_solve_sym(const Matrix& m, const Vector& d) {
  return pseudoinverse_sym(m) * d;
}

Spectrum spectrum_of_matrix(const Matrix& w) {
  if (w.rows() != w.cols()) throw ValidationError("spectrum_of_matrix: matrix must be square");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(w);
  if (eig.info() != Eigen::Success) throw NumericalError("spectrum_of_matrix: eigensolver failed");
  Spectrum s;
  const Vector& ev = eig.eigenvalues();  // ascending
  s.eigenvalues.assign(ev.data(), ev.data() + ev.size());
  std::reverse(s.eigenvalues.begin(), s.eigenvalues.end());
  s.lambda_max = s.eigenvalues.front();
  const double zero_tol = 1e-10 * std::max(s.lambda_max, 0.0);
  s.lambda_min_plus = 0.0;
  s.rank = 0;
  for (double v : s.eigenvalues) {
    if (v > zero_tol) {
      s.lambda_min_plus = v;
      ++s.rank;
    }
  }
  if (s.rank == 0) throw NumericalError("spectrum_of_matrix: matrix is numerically zero");
  return s;
}

Matrix range_basis(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return Matrix::Zero(m.rows(), 0);
  const double tol = rank_threshold(m.rows(), m.cols(), sv(0));
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) ++r;
  return svd.matrixU().leftCols(r);
}

Eigen::Index numerical_rank(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return 0;
  const double tol = rank_threshold(m.rows(), m.cols(), sv(0));
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) ++r;
  return r;
}

}  // namespace sap

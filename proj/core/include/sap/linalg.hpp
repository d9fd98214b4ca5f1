#ifndef SAP_LINALG_HPP
#define SAP_LINALG_HPP

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "sap/errors.hpp"

namespace sap {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

bool is_finite(const Matrix& m);
bool is_finite(const Vector& v);

// Symmetric positive definite geometry matrix B, stored dense or as a
// diagonal of positive weights. Dense inputs are validated for symmetry up
// front; positive definiteness is checked lazily on first factorization.
class SpdMatrix {
 public:
  // Identity of the given order.
  static SpdMatrix identity(Eigen::Index n);
  static SpdMatrix diagonal(Vector weights);
  static SpdMatrix dense(Matrix b);

  Eigen::Index size() const { return n_; }
  bool is_diagonal() const { return dense_.size() == 0; }
  bool is_identity() const;

  const Vector& diagonal_weights() const { return diag_; }
  Matrix to_matrix() const;

  // B^{-1} v
  Vector solve(const Vector& v) const;
  // B v
  Vector apply(const Vector& v) const;
  // <u, v>_B
  double inner(const Vector& u, const Vector& v) const;
  // ||v||_B
  double norm(const Vector& v) const;
  // a^T B^{-1} a
  double inv_quad(const Vector& a) const;
  // B^{-1/2} M B^{-1/2} for symmetric M
  Matrix sqrt_inv_sandwich(const Matrix& m) const;
  // B^{-1/2} v
  Vector inv_sqrt_apply(const Vector& v) const;

 private:
  Eigen::Index n_ = 0;
  Vector diag_;   // diagonal form (empty when dense)
  Matrix dense_;  // dense form (empty when diagonal)
  mutable std::optional<Eigen::LLT<Matrix>> llt_;
  mutable std::optional<Matrix> inv_sqrt_;
  void ensure_factorized() const;
  const Matrix& inv_sqrt() const;
};

// Moore-Penrose pseudoinverse via SVD: reciprocal of singular values above
// eps * max(rows, cols) * sigma_max, zeros left in place.
Matrix pseudoinverse(const Matrix& m);

// Pseudoinverse of a symmetric PSD matrix via eigendecomposition. Same rank
// threshold; considerably cheaper than the SVD route for the m x m Gram
// matrices the solvers build.
Matrix pseudoinverse_sym(const Matrix& m);

// x minimizing ||M x - d|| with minimum norm (M symmetric PSD).
Vector least_norm_solve_sym(const Matrix& m, const Vector& d);

struct Spectrum {
  std::vector<double> eigenvalues;  // sorted descending
  double lambda_max = 0.0;
  double lambda_min_plus = 0.0;  // smallest eigenvalue above 1e-10 * lambda_max
  Eigen::Index rank = 0;
};

// Spectrum of a symmetric PSD matrix (intended for W).
Spectrum spectrum_of_matrix(const Matrix& w);

// Orthonormal basis of the column space of m (columns), rank decided by the
// pseudoinverse threshold.
Matrix range_basis(const Matrix& m);

// Numerical rank at the pseudoinverse threshold.
Eigen::Index numerical_rank(const Matrix& m);

}  // namespace sap

#endif

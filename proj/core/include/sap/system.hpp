#ifndef SAP_SYSTEM_HPP
#define SAP_SYSTEM_HPP

#include <optional>

#include "sap/linalg.hpp"
#include "sap/sketch.hpp"

namespace sap {

// Consistent linear system A x = b with geometry matrix B. Consistency is
// certified at construction: the least-squares residual must not exceed
// 1e-8 * max(1, ||b||).
class LinearSystem {
 public:
  LinearSystem(Matrix a, Vector b, SpdMatrix geometry);
  LinearSystem(Matrix a, Vector b);  // B = I

  const Matrix& A() const { return a_; }
  const Vector& b() const { return b_; }
  const SpdMatrix& B() const { return geometry_; }
  Eigen::Index rows() const { return a_.rows(); }
  Eigen::Index cols() const { return a_.cols(); }

 private:
  Matrix a_;
  Vector b_;
  SpdMatrix geometry_;
  void validate() const;
};

// Z = A^T S (S^T A B^{-1} A^T S)^dagger S^T A for one realized sketch.
Matrix sketch_Z(const LinearSystem& system, const Sketch& sketch);

// Closed-form E[Z] by summation over the finite support of the distribution.
// Throws UnsupportedClosedFormError for the Gaussian sketch and for block
// supports larger than the enumeration cap.
Matrix expected_Z(const LinearSystem& system, const SketchDistribution& dist);

// Monte-Carlo estimate of E[Z]; deterministic given the seed.
Matrix estimate_EZ(const LinearSystem& system, const SketchDistribution& dist,
                   long long samples, std::uint64_t seed);

// Spectrum of W = B^{-1/2} E[Z] B^{-1/2}.
Spectrum spectrum_of_W(const LinearSystem& system, const SketchDistribution& dist);
Spectrum spectrum_of_W(const LinearSystem& system, const Matrix& expected_z);

// Pi_{L,B}(x) = x - B^{-1} A^T (A B^{-1} A^T)^dagger (A x - b).
Vector project_onto_solution_set(const LinearSystem& system, const Vector& x);

// Exactness condition Null(E[Z]) = Null(A), compared via ranks and mutual
// containment of nullspace bases at tolerance 1e-8.
bool exactness_holds(const LinearSystem& system, const Matrix& expected_z);
bool exactness_holds(const LinearSystem& system, const SketchDistribution& dist);

// f_S(x) = 1/2 (Ax-b)^T H (Ax-b) for one realized sketch.
double stochastic_value(const LinearSystem& system, const Sketch& sketch, const Vector& x);

// grad f_S(x) in the B-geometry: B^{-1} A^T H (Ax - b).
Vector stochastic_gradient(const LinearSystem& system, const Sketch& sketch, const Vector& x);

// f(x) = E[f_S(x)] where the support is finite (same cap as expected_Z).
double objective_value(const LinearSystem& system, const SketchDistribution& dist,
                       const Vector& x);

}  // namespace sap

#endif

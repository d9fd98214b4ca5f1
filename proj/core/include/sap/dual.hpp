#ifndef SAP_DUAL_HPP
#define SAP_DUAL_HPP

#include "sap/rng.hpp"
#include "sap/sketch.hpp"
#include "sap/system.hpp"

namespace sap {

// Dual iterate pair for SDSA-family methods, with the primal images
// phi(y) = x0 + B^{-1} A^T y cached and updated incrementally. y^0 = 0, as the
// correspondence theorems require.
struct DualState {
  Vector y_curr;
  Vector y_prev;
  Vector x0;
  Vector phi_curr;
  Vector phi_prev;
  long long iteration = 0;

  DualState(Eigen::Index m, Vector start)
      : y_curr(Vector::Zero(m)),
        y_prev(Vector::Zero(m)),
        x0(std::move(start)),
        phi_curr(x0),
        phi_prev(x0) {}
};

// D(y) = (b - A x0)^T y - 1/2 ||A^T y||^2_{B^{-1}}.
double dual_value(const LinearSystem& system, const Vector& x0, const Vector& y);

// phi(y) = x0 + B^{-1} A^T y.
Vector primal_from_dual(const LinearSystem& system, const Vector& x0, const Vector& y);

// Least-norm maximizer of D: y* = (A B^{-1} A^T)^dagger (b - A x0).
Vector dual_optimum(const LinearSystem& system, const Vector& x0);

// One SDSA step: y <- y + omega S lambda with lambda the least-norm maximizer
// of D along the sketched subspace.
void sdsa_step(DualState& state, const LinearSystem& system, const SketchDistribution& dist,
               double omega, Rng& rng);

// Heavy-ball variant; requires y^0 = y^1 = 0 which DualState guarantees.
void msdsa_step(DualState& state, const LinearSystem& system, const SketchDistribution& dist,
                double omega, double beta, Rng& rng);

// Step applied to an externally drawn sketch (used by the gossip facade and
// by the correspondence tests that share one RNG stream between methods).
void msdsa_apply(DualState& state, const LinearSystem& system, const Sketch& sketch, double omega,
                 double beta);

}  // namespace sap

#endif

#ifndef SAP_INEXACT_HPP
#define SAP_INEXACT_HPP

#include "sap/dual.hpp"
#include "sap/solver.hpp"

namespace sap {

// Per-iteration bound sigma_k on the inexactness error, for the abstract
// error model. Constant or geometrically decaying.
struct SigmaSchedule {
  enum class Kind { Constant, Geometric };
  Kind kind = Kind::Constant;
  double initial = 0.0;
  double ratio = 1.0;

  static SigmaSchedule constant(double sigma);
  static SigmaSchedule geometric(double initial, double ratio);
  double at(long long k) const;
};

enum class InnerSolverKind { CG, SketchProject };

// How the inexactness error of one iBasic/iSDSA step is produced.
struct InexactnessSpec {
  enum class Variant { AbstractBounded, NormProportional, FunctionProportional, StructuredInner };

  Variant variant = Variant::StructuredInner;
  SigmaSchedule sigma;           // AbstractBounded
  double q = 0.0;                // NormProportional / FunctionProportional
  Vector x_star;                 // NormProportional reference point
  InnerSolverKind inner = InnerSolverKind::CG;
  int inner_iterations = 1;      // r

  static InexactnessSpec abstract_bounded(SigmaSchedule sigma);
  // rho >= 0 enables the theorem-range check 0 <= q < 1 - sqrt(rho).
  static InexactnessSpec norm_proportional(double q, Vector x_star, double rho = -1.0);
  static InexactnessSpec function_proportional(double q);
  static InexactnessSpec structured(InnerSolverKind inner, int r);
};

// r plain conjugate-gradient iterations on M lambda = d from lambda = 0.
// Throws NumericalError when M is not positive definite beyond tolerance.
Vector inner_cg(const Matrix& m, const Vector& d, int r);

// r coordinate sketch-and-project iterations on M lambda = d from lambda = 0
// (least-norm start), rows drawn with squared-row-norm probabilities.
Vector inner_sketch_project(const Matrix& m, const Vector& d, int r, Rng& rng);

// Diagnostics of one inexact step, for the invariant checks.
struct InexactReport {
  Sketch sketch;
  Matrix m;              // S^T A B^{-1} A^T S
  Vector lambda_exact;   // least-norm solution
  Vector lambda_used;    // what the step actually applied
  Vector epsilon;        // realized error, primal space
  Vector epsilon_dual;   // realized error, dual space (iSDSA only)
  double f_value = 0.0;  // f_{S_k}(x^k)
};

// x^{k+1} = x^k - omega grad f_{S_k}(x^k) + eps^k, with eps^k realized
// according to the spec's variant. Abstract errors are drawn with exact
// B-norm sigma_k in a uniformly random B-sphere direction.
void ibasic_step(SolverState& state, const LinearSystem& system, const SketchDistribution& dist,
                 double omega, const InexactnessSpec& spec, InexactReport* report = nullptr);

// Dual counterpart; the dual error eps_d maps to the primal error through
// eps = B^{-1} A^T eps_d.
void isdsa_step(DualState& state, const LinearSystem& system, const SketchDistribution& dist,
                double omega, const InexactnessSpec& spec, Rng& rng,
                InexactReport* report = nullptr);

// Worst-case per-inner-iteration contraction theta of the chosen inner
// method, maximized over the finite support of the distribution:
// CG: ((sqrt(kappa)-1)/(sqrt(kappa)+1))^4, SP: 1 - lambda_min^+ of the inner W.
double structured_theta(const LinearSystem& system, const SketchDistribution& dist,
                        InnerSolverKind inner);

}  // namespace sap

#endif

#ifndef SAP_SOLVER_HPP
#define SAP_SOLVER_HPP

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "sap/rates.hpp"
#include "sap/rng.hpp"
#include "sap/sketch.hpp"
#include "sap/system.hpp"
#include "sap/trace.hpp"

namespace sap {

struct InexactnessSpec;

// Update kernels shared by the solver facade and the gossip protocols. Both
// sides call these with identical arguments, which is what makes the
// solver/gossip trajectories bit-identical under a shared RNG stream.
namespace kernel {

// Relaxed row projection x <- x - omega (A_i x - b_i)/(A_i B^{-1} A_i^T) B^{-1} A_i^T.
// Touches only the structural nonzeros of the row when B is diagonal.
void row_update(Vector& x, const LinearSystem& system, int row, double omega);

// Heavy-ball variant; on return x holds x^{k+1} and x_prev holds x^k.
void row_update_momentum(Vector& x, Vector& x_prev, const LinearSystem& system, int row,
                         double omega, double beta);

// Block projection step with S = I_{:C}.
void block_update(Vector& x, const LinearSystem& system, std::span<const int> rows, double omega);
void block_update_momentum(Vector& x, Vector& x_prev, const LinearSystem& system,
                           std::span<const int> rows, double omega, double beta);

// Gaussian-sketch step.
void gaussian_update(Vector& x, const LinearSystem& system, const Vector& coeffs, double omega);

// Stochastic-momentum step: full row update plus gamma e_ik^T (x - x_prev) e_ik.
void row_update_stochastic_momentum(Vector& x, Vector& x_prev, const LinearSystem& system,
                                    int row, int ik, double omega, double gamma);

// One AccRK iteration on row `row`; y is caller-provided scratch.
void acc_update(Vector& x, Vector& v, Vector& y, const LinearSystem& system, int row,
                double alpha_k, double beta_k, double gamma_k);

// Dispatch on the sketch shape (row / block / gaussian).
void sketched_update(Vector& x, const LinearSystem& system, const Sketch& sketch, double omega);
void sketched_update_momentum(Vector& x, Vector& x_prev, const LinearSystem& system,
                              const Sketch& sketch, double omega, double beta);

}  // namespace kernel

// Iterate pair plus the solver's private RNG stream. x_prev == x_curr at
// iteration 0, as the momentum theory requires.
struct SolverState {
  Vector x_curr;
  Vector x_prev;
  long long iteration = 0;
  Rng rng;

  SolverState(Vector x0, Rng stream)
      : x_curr(std::move(x0)), x_prev(x_curr), rng(std::move(stream)) {}
};

// One step of the basic method (= SGD = SN = SPP); draws a fresh sketch from
// state.rng. omega outside (0,2) is accepted with a warning to stderr.
void basic_step(SolverState& state, const LinearSystem& system, const SketchDistribution& dist,
                double omega);

// Heavy-ball step x^{k+1} = x^k - omega grad f_S(x^k) + beta (x^k - x^{k-1}).
void momentum_step(SolverState& state, const LinearSystem& system, const SketchDistribution& dist,
                   double omega, double beta);

// Momentum term replaced by gamma e_ik^T (x^k - x^{k-1}) e_ik with i_k uniform
// on [n]; requires B = I.
void stochastic_momentum_step(SolverState& state, const LinearSystem& system,
                              const SketchDistribution& dist, double omega, double gamma);

// Accelerated (Nesterov) iterate triple. Rows are sampled uniformly, as the
// accelerated theory prescribes.
struct AccState {
  Vector x;
  Vector v;
  Vector y;  // scratch
  long long iteration = 0;
  Rng rng;

  AccState(Vector x0, Rng stream) : x(std::move(x0)), v(x), y(x), rng(std::move(stream)) {}
};

void acc_step(AccState& state, const LinearSystem& system, AccParams& params);

// Normalized copy of a system: rows of A scaled to unit Euclidean norm and b
// rescaled accordingly. Requires B = I.
LinearSystem normalize_rows(const LinearSystem& system);

// Running mean of iterates x^1..x^k.
class CesaroAverage {
 public:
  void add(const Vector& x);
  const Vector& mean() const;
  long long count() const { return count_; }

 private:
  Vector mean_;
  long long count_ = 0;
};

enum class SolverVariant { Basic, Momentum, StochasticMomentum, Accelerated, Inexact, Dual };

struct SolverConfig {
  SolverVariant variant = SolverVariant::Basic;
  double omega = 1.0;
  double beta = 0.0;
  double gamma = 0.0;
  AccOption acc_option = AccOption::Two;
  double acc_lambda = -1.0;  // < 0: use lambda_min^+(A^T A)
  double acc_nu = -1.0;      // < 0: use the safe upper bound m
  std::shared_ptr<const InexactnessSpec> inexact;
};

struct StopRule {
  long long max_iterations = 1000;
  double target_rel_error = 0.0;  // on ||x-x*||_B^2 / ||x0-x*||_B^2
};

using MetricHook = std::function<double(const Vector& x, long long iteration)>;

struct RunOptions {
  long long record_every = 1;
  bool record_objective = true;  // f(x^k) where a closed form exists
  std::vector<std::pair<std::string, MetricHook>> hooks;
  int trial = 0;
};

// Executes the configured variant; records the relative error
// ||x^k-x*||_B^2/||x^0-x*||_B^2 (x* from the closed-form projection), f(x^k)
// when available, and any custom hooks. Deterministic given the rng stream.
Trace run(const LinearSystem& system, const SketchDistribution& dist, const SolverConfig& config,
          const Vector& x0, const StopRule& stop, const RunOptions& options, Rng rng);

}  // namespace sap

#endif

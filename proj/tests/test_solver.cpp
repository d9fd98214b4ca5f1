#include <cmath>

#include "doctest.h"
#include "sap/graph.hpp"
#include "sap/solver.hpp"
#include "util.hpp"

using namespace sap;
using testutil::random_vector;

TEST_CASE("basic step with a coordinate sketch is the relaxed row projection") {
  const LinearSystem sys = testutil::random_consistent(5, 3, 101);
  const double omega = 1.4;
  Rng probe(7);
  const auto dist = SketchDistribution::coordinate_row_norms(sys);
  SolverState state(random_vector(3, 5), Rng(7));
  const Vector x = state.x_curr;
  basic_step(state, sys, dist, omega);
  // replicate: same draw, closed-form RK row update
  const Sketch s = dist.draw(probe);
  const int i = s.rows[0];
  const Vector row = sys.A().row(i).transpose();
  const Vector expected =
      x - omega * (row.dot(x) - sys.b()(i)) / row.squaredNorm() * row;
  CHECK((state.x_curr - expected).norm() <= 1e-12 * std::max(1.0, expected.norm()));
  CHECK((state.x_prev - x).norm() == 0.0);
}

TEST_CASE("omega = 0 leaves the iterate unchanged") {
  const LinearSystem sys = testutil::random_consistent(5, 3, 102);
  const auto dist = SketchDistribution::uniform_coordinate(5);
  SolverState state(random_vector(3, 6), Rng(8));
  const Vector x = state.x_curr;
  basic_step(state, sys, dist, 0.0);
  CHECK((state.x_curr - x).norm() == 0.0);
}

TEST_CASE("a vanishing sketched residual is a fixed point of the step") {
  // x solves the system, so S^T(Ax - b) = 0 for every sketch.
  const LinearSystem sys = testutil::random_consistent(5, 3, 103);
  const Vector z = sys.A().colPivHouseholderQr().solve(sys.b());
  const auto dist = SketchDistribution::uniform_block(5, 2);
  SolverState state(z, Rng(9));
  for (int k = 0; k < 20; ++k) basic_step(state, sys, dist, 1.0);
  CHECK((state.x_curr - z).norm() <= 1e-9);
}

TEST_CASE("predicted_rate matches the closed form and validates omega") {
  Spectrum s;
  s.eigenvalues = {0.9, 0.2};
  s.lambda_max = 0.9;
  s.lambda_min_plus = 0.2;
  s.rank = 2;
  CHECK(predicted_rate(s, 1.0).rho == doctest::Approx(0.8).epsilon(1e-14));
  CHECK_THROWS_AS(predicted_rate(s, 2.0), ValidationError);
  CHECK_THROWS_AS(predicted_rate(s, 0.0), ValidationError);
  const RatePrediction r = predicted_rate(s, 1.0);
  CHECK(r.iteration_bound(1e-3) ==
        static_cast<long long>(std::ceil(std::log(1e3) / (1.0 - 0.8))));
}

TEST_CASE("pairwise gossip rate is 1 - alpha/(2m) on the incidence system") {
  const Network g = cycle(100);
  const LinearSystem sys(incidence(g), Vector::Zero(g.edge_count()));
  const Spectrum s = spectrum_of_W(sys, SketchDistribution::uniform_coordinate(g.edge_count()));
  const double alpha = algebraic_connectivity(g);
  const RatePrediction r = predicted_rate(s, 1.0);
  CHECK(r.rho == doctest::Approx(1.0 - alpha / (2.0 * 100.0)).epsilon(1e-9));
  // paper's table: 1/lambda_min^+(L) = 253 at n = 100
  CHECK(r.rho == doctest::Approx(1.0 - (1.0 / 253.0) / 200.0).epsilon(1e-4));
}

TEST_CASE("run with zero iterations records only the initial point") {
  const LinearSystem sys = testutil::random_consistent(6, 4, 104);
  const auto dist = SketchDistribution::coordinate_row_norms(sys);
  SolverConfig cfg;
  const Trace t = run(sys, dist, cfg, Vector::Zero(4), {0, 0.0}, {}, Rng(1));
  const auto series = t.series(0, "rel_err");
  REQUIRE(series.size() == 1);
  CHECK(series[0].first == 0);
  CHECK(series[0].second == doctest::Approx(1.0));
}

TEST_CASE("full-system block sketch solves in one step") {
  const LinearSystem sys = testutil::random_consistent(6, 4, 105);
  const auto dist = SketchDistribution::uniform_block(6, 6);
  SolverConfig cfg;
  const Trace t = run(sys, dist, cfg, Vector::Zero(4), {1, 0.0}, {}, Rng(2));
  const auto series = t.series(0, "rel_err");
  REQUIRE(series.size() == 2);
  CHECK(series[1].second <= 1e-20);
}

TEST_CASE("RK decay factor tracks the predicted rate on a Gaussian system") {
  // Statistical fit of the mean squared error over trials against
  // rho = 1 - lambda_min^+ at omega = 1.
  const LinearSystem sys = gaussian_system(50, 20, 2024);
  const auto dist = SketchDistribution::coordinate_row_norms(sys);
  const double rho = predicted_rate(spectrum_of_W(sys, dist), 1.0).rho;
  const long long iters = 1500;
  Trace all;
  SolverConfig cfg;
  for (int t = 0; t < 100; ++t) {
    RunOptions opts;
    opts.trial = t;
    opts.record_objective = false;
    all.append(run(sys, dist, cfg, Vector::Zero(20), {iters, 0.0}, opts, Rng::for_trial(9, t)));
  }
  const double fitted = fitted_decay_factor(all.mean_series("rel_err"), iters / 3, iters);
  CHECK(fitted <= rho + 0.02);
  CHECK(fitted >= rho - 0.05);
}

TEST_CASE("monotone distance per realized step for omega in (0,2)") {
  const LinearSystem sys = testutil::random_consistent(8, 5, 106, true);
  const Vector x0 = random_vector(5, 60);
  const Vector x_star = project_onto_solution_set(sys, x0);
  for (double omega : {0.5, 1.0, 1.7}) {
    const auto dist = SketchDistribution::uniform_block(8, 2);
    SolverState state(x0, Rng(70));
    double prev = sys.B().inner(state.x_curr - x_star, state.x_curr - x_star);
    for (int k = 0; k < 300; ++k) {
      basic_step(state, sys, dist, omega);
      const double cur = sys.B().inner(state.x_curr - x_star, state.x_curr - x_star);
      CHECK(cur <= prev + 1e-12);
      prev = cur;
    }
  }
}

TEST_CASE("quadratic bounds hold where f has a closed form") {
  const LinearSystem sys = testutil::random_consistent(7, 4, 107, true);
  const auto dist = SketchDistribution::coordinate_row_norms(sys);
  const Spectrum s = spectrum_of_W(sys, dist);
  const Matrix ez = expected_Z(sys, dist);
  for (int rep = 0; rep < 1000; ++rep) {
    const Vector x = random_vector(4, 200 + static_cast<std::uint64_t>(rep));
    const double f = objective_value(sys, dist, x);
    // grad f = B^{-1} E[Z] (x - x*) for any solution x*
    const Vector z = sys.A().colPivHouseholderQr().solve(sys.b());
    const Vector grad = sys.B().solve(ez * (x - z));
    const double gnorm_sq = sys.B().inner(grad, grad);
    CHECK(s.lambda_min_plus * f <= 0.5 * gnorm_sq + 1e-9);
    CHECK(0.5 * gnorm_sq <= s.lambda_max * f + 1e-9);
    const Vector x_star = project_onto_solution_set(sys, x);
    const double dist_sq = sys.B().inner(x - x_star, x - x_star);
    CHECK(0.5 * s.lambda_min_plus * dist_sq <= f + 1e-9);
    CHECK(f <= 0.5 * s.lambda_max * dist_sq + 1e-9);
  }
}

TEST_CASE("iterates stay in x0 + Range(B^{-1} A^T)") {
  // rank-3 factor model so Null(A) is two-dimensional
  const Matrix a = testutil::random_matrix(6, 3, 108) * testutil::random_matrix(3, 5, 208);
  const Vector z = testutil::random_vector(5, 308);
  Rng wr(408);
  Vector w(5);
  for (int i = 0; i < 5; ++i) w(i) = 0.5 + wr.uniform();
  const LinearSystem sys(a, a * z, SpdMatrix::diagonal(w));
  const auto dist = SketchDistribution::coordinate_row_norms(sys);
  // Basis for Null(A); B-orthogonality of B^{-1}A^T directions to Null(A) is
  // the invariant being exercised.
  Eigen::JacobiSVD<Matrix> svd(sys.A(), Eigen::ComputeFullV);
  const Eigen::Index rank = numerical_rank(sys.A());
  const Matrix null_basis = svd.matrixV().rightCols(5 - rank);
  REQUIRE(null_basis.cols() > 0);
  SolverState state(random_vector(5, 61), Rng(71));
  const Vector x0 = state.x_curr;
  for (int k = 0; k < 200; ++k) {
    basic_step(state, sys, dist, 1.0);
    const Vector drift = state.x_curr - x0;
    // components of drift on Null(A) in the B-geometry must vanish
    for (Eigen::Index c = 0; c < null_basis.cols(); ++c) {
      const Vector nb = null_basis.col(c);
      CHECK(std::abs(sys.B().inner(drift, nb)) / std::max(1.0, drift.norm()) <= 1e-9);
    }
  }
}

TEST_CASE("cesaro average of a constant sequence is the constant") {
  CesaroAverage avg;
  const Vector v = random_vector(3, 62);
  for (int i = 0; i < 5; ++i) avg.add(v);
  CHECK((avg.mean() - v).norm() <= 1e-15);
  CesaroAverage two;
  Vector a(1), b(1);
  a << 1.0;
  b << 3.0;
  two.add(a);
  two.add(b);
  CHECK(two.mean()(0) == doctest::Approx(2.0));
}

TEST_CASE("gaussian sketch step is the sketched projection") {
  const LinearSystem sys = testutil::random_consistent(5, 3, 109);
  SolverState state(random_vector(3, 63), Rng(72));
  const Vector x = state.x_curr;
  const auto dist = SketchDistribution::gaussian_vector(5);
  Rng probe(72);
  const Sketch s = dist.draw(probe);
  basic_step(state, sys, dist, 1.0);
  const Vector u = sys.A().transpose() * s.gaussian;
  const Vector expected = x - (u.dot(x) - s.gaussian.dot(sys.b())) / u.squaredNorm() * u;
  CHECK((state.x_curr - expected).norm() <= 1e-12);
}

#include <cmath>
#include <map>

#include "doctest.h"
#include "sap/system.hpp"
#include "util.hpp"

using namespace sap;

TEST_CASE("coordinate sketch with a point mass always returns that index") {
  const auto dist = SketchDistribution::coordinate({1.0, 0.0, 0.0});
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    const Sketch s = dist.draw(rng);
    REQUIRE(s.rows.size() == 1);
    CHECK(s.rows[0] == 0);
  }
}

TEST_CASE("full-size block draws the whole index set") {
  const int m = 6;
  const auto dist = SketchDistribution::uniform_block(m, m);
  Rng rng(6);
  for (int rep = 0; rep < 20; ++rep) {
    const Sketch s = dist.draw(rng);
    REQUIRE(static_cast<int>(s.rows.size()) == m);
    for (int i = 0; i < m; ++i) CHECK(s.rows[static_cast<std::size_t>(i)] == i);
  }
}

TEST_CASE("block draws have no duplicates and exactly tau entries") {
  const auto dist = SketchDistribution::uniform_block(9, 4);
  Rng rng(7);
  for (int rep = 0; rep < 1000; ++rep) {
    const Sketch s = dist.draw(rng);
    REQUIRE(s.rows.size() == 4);
    for (std::size_t i = 1; i < s.rows.size(); ++i) CHECK(s.rows[i] > s.rows[i - 1]);
    for (int idx : s.rows) {
      CHECK(idx >= 0);
      CHECK(idx < 9);
    }
  }
}

TEST_CASE("empirical frequencies match the row-norm probabilities (3-sigma)") {
  const LinearSystem sys = testutil::random_consistent(5, 3, 91);
  const auto dist = SketchDistribution::coordinate_row_norms(sys);
  const int draws = 100000;
  Rng rng(8);
  std::map<int, int> counts;
  for (int k = 0; k < draws; ++k) ++counts[dist.draw(rng).rows[0]];
  for (int i = 0; i < 5; ++i) {
    const double p = dist.probabilities()[static_cast<std::size_t>(i)];
    const double sigma = std::sqrt(p * (1.0 - p) * draws);
    CHECK(std::abs(counts[i] - p * draws) <= 3.0 * sigma + 1.0);
  }
}

TEST_CASE("row-norm probabilities reject zero rows") {
  Matrix a = Matrix::Zero(3, 2);
  a(0, 0) = 1.0;
  a(2, 1) = 2.0;  // row 1 is zero
  const LinearSystem sys(a, Vector::Zero(3));
  CHECK_THROWS_AS(SketchDistribution::coordinate_row_norms(sys), ValidationError);
}

TEST_CASE("probability vectors must be a distribution") {
  CHECK_THROWS_AS(SketchDistribution::coordinate({0.5, 0.4}), ValidationError);
  CHECK_THROWS_AS(SketchDistribution::coordinate({1.5, -0.5}), ValidationError);
  CHECK_THROWS_AS(SketchDistribution::uniform_block(4, 5), ValidationError);
  CHECK_THROWS_AS(SketchDistribution::fixed_sets(4, {{0, 0}}, {1.0}), ValidationError);
  CHECK_THROWS_AS(SketchDistribution::fixed_sets(4, {{}}, {1.0}), ValidationError);
}

TEST_CASE("convenient probabilities make E[H] a multiple of the identity") {
  // E[H] = I / ||B^{-1/2} A^T||_F^2, verified by enumeration over rows.
  const LinearSystem sys = testutil::random_consistent(6, 3, 92, true);
  const auto dist = SketchDistribution::coordinate_row_norms(sys);
  double frob = 0.0;
  for (Eigen::Index i = 0; i < sys.rows(); ++i)
    frob += sys.B().inv_quad(sys.A().row(i).transpose());
  Matrix eh = Matrix::Zero(6, 6);
  for (Eigen::Index i = 0; i < sys.rows(); ++i) {
    const double denom = sys.B().inv_quad(sys.A().row(i).transpose());
    Vector ei = Vector::Zero(6);
    ei(i) = 1.0;
    eh += dist.probabilities()[static_cast<std::size_t>(i)] / denom * (ei * ei.transpose());
  }
  CHECK((eh - Matrix::Identity(6, 6) / frob).norm() <= 1e-12 * eh.norm());
}

TEST_CASE("draws are deterministic per seed") {
  const auto dist = SketchDistribution::uniform_block(8, 3);
  Rng a(33), b(33);
  for (int rep = 0; rep < 50; ++rep) {
    const Sketch sa = dist.draw(a);
    const Sketch sb = dist.draw(b);
    CHECK(sa.rows == sb.rows);
  }
}

TEST_CASE("gaussian sketches have the right length and moments") {
  const auto dist = SketchDistribution::gaussian_vector(40);
  Rng rng(44);
  double sum = 0.0, sumsq = 0.0;
  const int reps = 2000;
  for (int rep = 0; rep < reps; ++rep) {
    const Sketch s = dist.draw(rng);
    REQUIRE(s.is_gaussian());
    REQUIRE(s.gaussian.size() == 40);
    sum += s.gaussian.sum();
    sumsq += s.gaussian.squaredNorm();
  }
  const double count = 40.0 * reps;
  CHECK(std::abs(sum / count) <= 3.0 / std::sqrt(count));
  CHECK(sumsq / count == doctest::Approx(1.0).epsilon(0.02));
}

#include "sap/sketch.hpp"

#include <cmath>

#include "sap/system.hpp"

namespace sap {

namespace {

void validate_probabilities(const std::vector<double>& p) {
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0)) throw ValidationError("sketch: probabilities must be nonnegative");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw ValidationError("sketch: probabilities must sum to 1 within 1e-12");
}

}  // namespace

SketchDistribution SketchDistribution::coordinate(std::vector<double> probabilities) {
  if (probabilities.empty()) throw ValidationError("sketch: empty probability vector");
  validate_probabilities(probabilities);
  SketchDistribution d;
  d.kind_ = Kind::Coordinate;
  d.m_ = static_cast<int>(probabilities.size());
  d.probs_ = std::move(probabilities);
  return d;
}

SketchDistribution SketchDistribution::coordinate_row_norms(const LinearSystem& system) {
  const Matrix& a = system.A();
  std::vector<double> p(static_cast<std::size_t>(a.rows()));
  double total = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const double w = system.B().inv_quad(a.row(i).transpose());
    if (w <= 0.0)
      throw ValidationError("sketch: row " + std::to_string(i) +
                            " has zero norm; row-norm probabilities undefined");
    p[static_cast<std::size_t>(i)] = w;
    total += w;
  }
  for (double& v : p) v /= total;
  return coordinate(std::move(p));
}

SketchDistribution SketchDistribution::uniform_coordinate(int m) {
  if (m < 1) throw ValidationError("sketch: m must be >= 1");
  return coordinate(std::vector<double>(static_cast<std::size_t>(m), 1.0 / m));
}

SketchDistribution SketchDistribution::uniform_block(int m, int tau) {
  if (m < 1) throw ValidationError("sketch: m must be >= 1");
  if (tau < 1 || tau > m) throw ValidationError("sketch: block size must satisfy 1 <= tau <= m");
  SketchDistribution d;
  d.kind_ = Kind::UniformBlock;
  d.m_ = m;
  d.tau_ = tau;
  return d;
}

SketchDistribution SketchDistribution::fixed_sets(int m, std::vector<std::vector<int>> sets,
                                                  std::vector<double> probabilities) {
  if (sets.empty() || sets.size() != probabilities.size())
    throw ValidationError("sketch: fixed sets and probabilities must be nonempty and match");
  for (auto& s : sets) {
    if (s.empty()) throw ValidationError("sketch: fixed set must be nonempty");
    std::sort(s.begin(), s.end());
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] < 0 || s[i] >= m) throw ValidationError("sketch: fixed set index out of range");
      if (i > 0 && s[i] == s[i - 1]) throw ValidationError("sketch: duplicate index in fixed set");
    }
  }
  validate_probabilities(probabilities);
  SketchDistribution d;
  d.kind_ = Kind::FixedSets;
  d.m_ = m;
  d.sets_ = std::move(sets);
  d.probs_ = std::move(probabilities);
  return d;
}

SketchDistribution SketchDistribution::gaussian_vector(int m) {
  if (m < 1) throw ValidationError("sketch: m must be >= 1");
  SketchDistribution d;
  d.kind_ = Kind::GaussianVector;
  d.m_ = m;
  return d;
}

long long SketchDistribution::support_size() const {
  switch (kind_) {
    case Kind::Coordinate:
      return m_;
    case Kind::FixedSets:
      return static_cast<long long>(sets_.size());
    case Kind::UniformBlock: {
      long long c = 1;
      for (int i = 1; i <= tau_; ++i) {
        c = c * (m_ - tau_ + i) / i;
        if (c < 0 || c > (1ll << 42)) return 1ll << 42;  // saturate
      }
      return c;
    }
    case Kind::GaussianVector:
      throw UnsupportedClosedFormError("sketch: Gaussian distribution has continuous support");
  }
  throw ValidationError("sketch: unknown kind");
}

Sketch SketchDistribution::draw(Rng& rng) const {
  Sketch s;
  switch (kind_) {
    case Kind::Coordinate:
      s.rows = {static_cast<int>(rng.categorical(probs_))};
      break;
    case Kind::UniformBlock:
      s.rows = rng.subset(m_, tau_);
      break;
    case Kind::FixedSets:
      s.rows = sets_[rng.categorical(probs_)];
      break;
    case Kind::GaussianVector: {
      s.gaussian.resize(m_);
      for (int i = 0; i < m_; ++i) s.gaussian(i) = rng.normal();
      break;
    }
  }
  return s;
}

}  // namespace sap

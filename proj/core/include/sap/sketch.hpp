#ifndef SAP_SKETCH_HPP
#define SAP_SKETCH_HPP

#include <variant>
#include <vector>

#include "sap/linalg.hpp"
#include "sap/rng.hpp"

namespace sap {

class LinearSystem;

// One realized sketch: either a sorted set of row indices (S = I_{:C}) or a
// dense coefficient vector (Gaussian sketch, S in R^m).
struct Sketch {
  std::vector<int> rows;  // empty iff gaussian
  Vector gaussian;        // size 0 iff index sketch
  bool is_gaussian() const { return gaussian.size() != 0; }
};

// Distribution D over sketch matrices. Immutable after construction.
class SketchDistribution {
 public:
  enum class Kind { Coordinate, UniformBlock, FixedSets, GaussianVector };

  static SketchDistribution coordinate(std::vector<double> probabilities);
  // Convenient probabilities p_i = ||B^{-1/2} A_i:||^2 / ||B^{-1/2} A^T||_F^2.
  static SketchDistribution coordinate_row_norms(const LinearSystem& system);
  static SketchDistribution uniform_coordinate(int m);
  static SketchDistribution uniform_block(int m, int tau);
  static SketchDistribution fixed_sets(int m, std::vector<std::vector<int>> sets,
                                       std::vector<double> probabilities);
  static SketchDistribution gaussian_vector(int m);

  Kind kind() const { return kind_; }
  int row_count() const { return m_; }
  int block_size() const { return tau_; }
  const std::vector<double>& probabilities() const { return probs_; }
  const std::vector<std::vector<int>>& sets() const { return sets_; }

  // Number of atoms in the finite support; throws for the Gaussian variant.
  long long support_size() const;

  Sketch draw(Rng& rng) const;

 private:
  Kind kind_ = Kind::Coordinate;
  int m_ = 0;
  int tau_ = 1;
  std::vector<double> probs_;
  std::vector<std::vector<int>> sets_;
};

}  // namespace sap

#endif

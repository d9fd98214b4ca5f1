#ifndef SAP_TESTS_UTIL_HPP
#define SAP_TESTS_UTIL_HPP

#include <cstdint>

#include "sap/experiment.hpp"
#include "sap/rng.hpp"
#include "sap/system.hpp"

namespace sap::testutil {

inline Matrix random_matrix(int m, int n, std::uint64_t seed) {
  Rng rng(seed);
  Matrix a(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = rng.normal();
  return a;
}

inline Vector random_vector(int n, std::uint64_t seed) {
  Rng rng(seed ^ 0xabcdef12u);
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.normal();
  return v;
}

// Consistent system with b = A z; optionally with a random diagonal geometry.
inline LinearSystem random_consistent(int m, int n, std::uint64_t seed, bool diag_b = false) {
  Matrix a = random_matrix(m, n, seed);
  const Vector z = random_vector(n, seed + 1);
  Vector b = a * z;
  if (!diag_b) return LinearSystem(std::move(a), std::move(b));
  Rng rng(seed + 2);
  Vector w(n);
  for (int i = 0; i < n; ++i) w(i) = 0.5 + rng.uniform() * 2.0;
  return LinearSystem(std::move(a), std::move(b), SpdMatrix::diagonal(std::move(w)));
}

}  // namespace sap::testutil

#endif

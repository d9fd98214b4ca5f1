#ifndef SAP_RNG_HPP
#define SAP_RNG_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "sap/errors.hpp"

namespace sap {

// Seeded generator with hand-rolled distributions. The standard library's
// distribution objects are implementation defined, so trial streams would not
// reproduce across toolchains; everything here is pinned down to the raw
// mt19937_64 output, which is specified exactly.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed == 0 ? 0x9e3779b97f4a7c15ull : seed) {}

  // Independent stream for a (master seed, trial index) pair, splitmix64 mix.
  static Rng for_trial(std::uint64_t master_seed, std::uint64_t trial) {
    std::uint64_t z = master_seed + 0x9e3779b97f4a7c15ull * (trial + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return Rng(z ^ (z >> 31));
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on {0, ..., n-1}, unbiased via rejection.
  std::size_t uniform_index(std::size_t n) {
    if (n == 0) throw ValidationError("uniform_index: empty range");
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return static_cast<std::size_t>(x % n);
  }

  // Standard normal, Box-Muller. The sine partner is discarded so the call
  // sequence stays one-draw-one-value deterministic.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  // Index drawn from an (unnormalized is fine) pmf by inverse CDF walk.
  std::size_t categorical(std::span<const double> weights) {
    if (weights.empty()) throw ValidationError("categorical: empty pmf");
    double total = 0.0;
    for (double w : weights) total += w;
    const double u = uniform() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
      acc += weights[i];
      if (u < acc) return i;
    }
    return weights.size() - 1;
  }

  // Uniform tau-subset of {0..m-1} without replacement, partial Fisher-Yates.
  // The returned indices are sorted.
  std::vector<int> subset(int m, int tau) {
    if (tau < 1 || tau > m) throw ValidationError("subset: need 1 <= tau <= m");
    scratch_.resize(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) scratch_[static_cast<std::size_t>(i)] = i;
    std::vector<int> out(static_cast<std::size_t>(tau));
    for (int i = 0; i < tau; ++i) {
      const std::size_t j = static_cast<std::size_t>(i) + uniform_index(static_cast<std::size_t>(m - i));
      std::swap(scratch_[static_cast<std::size_t>(i)], scratch_[j]);
      out[static_cast<std::size_t>(i)] = scratch_[static_cast<std::size_t>(i)];
    }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  std::mt19937_64 engine_;
  std::vector<int> scratch_;
};

}  // namespace sap

#endif

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace treeglm {

/// Deterministic random draws on top of std::mt19937_64.
///
/// The engine itself is specified bit-exactly by the C++ standard, but the
/// <random> distributions are not, so every transform is implemented here.
/// Draw costs (in raw 64-bit engine outputs):
///   uniform   — 1
///   bernoulli — 1
///   normal    — 2 (Box-Muller, no caching)
///   poisson   — variable (Knuth search, ~lambda+1 on average)
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return uniform() < p; }

  /// Standard normal via Box-Muller; consumes two uniforms per call.
  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log1p(-u1)) *
           std::cos(2.0 * 3.141592653589793238462643383279502884 * u2);
  }

  /// Poisson count by Knuth's multiplicative search. Fine for the rate
  /// range used here (lambda <= a few hundred).
  long poisson(double lambda) {
    if (!(lambda > 0.0)) {
      throw std::domain_error("Rng::poisson: lambda must be positive");
    }
    const double floor_product = std::exp(-lambda);
    long k = 0;
    double product = 1.0;
    do {
      ++k;
      product *= uniform();
    } while (product > floor_product);
    return k - 1;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace treeglm

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "nvpol/constants.hpp"

namespace nvpol {

// Deterministic random source. mt19937_64 provides the bit stream (its
// output sequence is fixed by the standard); the value-level transforms
// live here because the std::*_distribution adapters are
// implementation-defined and would break byte-identical reproducibility
// across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform in [0, 1), 53-bit mantissa.
  double uniform01() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
  }

  // Uniform integer in [0, n), rejection-free modulo bias avoided by
  // rejecting the tail of the 64-bit range.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = gen_();
    } while (x >= limit);
    return x % n;
  }

  // Standard normal via Box-Muller; two fresh uniforms per call so the
  // stream position is a pure function of the call count.
  double normal(double mean, double sigma) {
    double u1;
    do {
      u1 = uniform01();
    } while (u1 <= 0.0);
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mean + sigma * r * std::cos(2.0 * kPi * u2);
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace nvpol

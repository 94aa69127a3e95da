#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace phasecut {

// Seedable generator built on std::mt19937_64, whose output sequence is fully
// specified by the standard, so experiments reproduce bit-exactly across
// platforms. All derived draws (uniform, normal, Poisson) are implemented
// here rather than via std::*_distribution, which is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  bool coin(double p_one = 0.5) { return uniform() < p_one; }

  // Standard normal via Box-Muller (one value per call, pair cached).
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  // Poisson sample: exact multiplication method for small means, rounded
  // Gaussian approximation (clamped at zero) for large ones where the
  // relative error is negligible.
  std::uint64_t poisson(double mean) {
    if (mean <= 0.0) return 0;
    if (mean < 30.0) {
      const double limit = std::exp(-mean);
      std::uint64_t k = 0;
      double prod = uniform();
      while (prod > limit) {
        ++k;
        prod *= uniform();
      }
      return k;
    }
    const double v = std::round(mean + std::sqrt(mean) * normal());
    return v <= 0.0 ? 0 : static_cast<std::uint64_t>(v);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

} // namespace phasecut

#pragma once

#include <cstdint>
#include <random>

#include "gyro/vec.hpp"

namespace gyro {

/// Deterministic random source.  All distributions are implemented by hand
/// on top of the raw 64-bit stream so that a given seed yields the same
/// sample sequence on every platform and standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  std::uint64_t bits() { return gen_(); }

  /// Standard 2D Gaussian via Box-Muller.
  Vec2 gauss2() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * 3.14159265358979323846 * uniform();
    return {r * std::cos(t), r * std::sin(t)};
  }

  /// 2D Gaussian with scale sigma, rejected until inside B(0, radius).
  Vec2 gauss2_truncated(double sigma, double radius) {
    for (;;) {
      const Vec2 g = sigma * gauss2();
      if (g.norm() <= radius) return g;
    }
  }

  Vec2 uniform_disc(double radius) {
    for (;;) {
      Vec2 u{uniform(-1.0, 1.0), uniform(-1.0, 1.0)};
      if (u.norm2() <= 1.0) return radius * u;
    }
  }

  Vec2 uniform_direction() {
    const double t = 2.0 * 3.14159265358979323846 * uniform();
    return {std::cos(t), std::sin(t)};
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace gyro

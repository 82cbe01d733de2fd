#pragma once

#include <vector>

namespace gyro {

/// Gauss-Legendre rule on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;

  explicit GaussLegendre(int order);

  /// Shared cache; rules are immutable once built.
  static const GaussLegendre& get(int order);

  /// Integrate f over [a, b].
  template <typename F>
  double integrate(double a, double b, F&& f) const {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i)
      acc += weights[i] * f(mid + half * nodes[i]);
    return half * acc;
  }
};

}  // namespace gyro

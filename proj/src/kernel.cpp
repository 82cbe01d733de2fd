#include "gyro/kernel.hpp"

#include <cmath>
#include <stdexcept>

namespace gyro {

namespace {
constexpr double kTwoPi = 2.0 * M_PI;
}

double pair_potential(PhasePoint z) {
  const double m = std::max(z.x.norm(), z.v.norm());
  if (m < kSingularTol)
    throw std::domain_error("pair_potential: singular input (x = v = 0)");
  return -std::log(m) / kTwoPi;
}

Vec2 force_kernel(PhasePoint z) {
  const double r = z.x.norm();
  const double s = z.v.norm();
  if (r < s) return {0.0, 0.0};  // screened region
  if (r < kSingularTol)
    throw std::domain_error("force_kernel: singular input near x = v = 0");
  return perp(z.x) / (kTwoPi * r * r);
}

IncrementIdentity increment_identity(Vec2 x, Vec2 xs) {
  const double rx = x.norm();
  const double rs = xs.norm();
  if (rx < kSingularTol || rs < kSingularTol)
    throw std::domain_error("increment_identity: zero vector");
  const Vec2 d = perp(x) / (rx * rx) - perp(xs) / (rs * rs);
  return {d.norm(), (x - xs).norm() / (rx * rs)};
}

double force_variation_bound(PhasePoint z, PhasePoint zs) {
  const double rx = z.x.norm(), rv = z.v.norm();
  const double sx = zs.x.norm(), sv = zs.v.norm();
  if (rx < kSingularTol || rv < kSingularTol || sx < kSingularTol ||
      sv < kSingularTol)
    throw std::domain_error("force_variation_bound: zero block");
  const double dx = (z.x - zs.x).norm();
  const double delta = dx + (z.v - zs.v).norm();

  double bound = 0.0;
  const double screened = (rv <= rx ? 1.0 / (rx * rx) : 0.0) +
                          (sv <= sx ? 1.0 / (sx * sx) : 0.0);
  bound += screened * dx / (4.0 * M_PI);
  if (rv <= rx && rx <= rv + delta) bound += 1.0 / (kTwoPi * rx);
  if (sv <= sx && sx <= sv + delta) bound += 1.0 / (kTwoPi * sx);
  return bound;
}

}  // namespace gyro

#pragma once

#include <cmath>

namespace gyro {

/// 2D vector in model units.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend Vec2 operator*(Vec2 a, double s) { return s * a; }
  friend Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }
  Vec2& operator+=(Vec2 b) { x += b.x; y += b.y; return *this; }
  Vec2& operator-=(Vec2 b) { x -= b.x; y -= b.y; return *this; }
  friend Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }

  double norm2() const { return x * x + y * y; }
  double norm() const { return std::hypot(x, y); }
  bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

/// Perpendicular vector: (u1,u2) -> (u2,-u1).  Preserves the norm and is
/// orthogonal to its argument.
inline Vec2 perp(Vec2 u) { return {u.y, -u.x}; }

/// Rotation by angle theta.
inline Vec2 rotate(Vec2 u, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  return {c * u.x - s * u.y, s * u.x + c * u.y};
}

/// Point z = (x, v) of the four-dimensional phase space: gyrocenter
/// position x and Larmor vector v.
struct PhasePoint {
  Vec2 x;
  Vec2 v;

  friend PhasePoint operator+(PhasePoint a, PhasePoint b) {
    return {a.x + b.x, a.v + b.v};
  }
  friend PhasePoint operator-(PhasePoint a, PhasePoint b) {
    return {a.x - b.x, a.v - b.v};
  }
  friend PhasePoint operator*(double s, PhasePoint a) {
    return {s * a.x, s * a.v};
  }
  PhasePoint& operator+=(PhasePoint b) { x += b.x; v += b.v; return *this; }

  /// Euclidean norm on R^4.
  double norm() const { return std::sqrt(x.norm2() + v.norm2()); }
  bool finite() const { return x.finite() && v.finite(); }

  /// Swap of position and velocity blocks.
  PhasePoint swapped() const { return {v, x}; }
};

}  // namespace gyro

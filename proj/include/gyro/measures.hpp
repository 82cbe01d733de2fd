#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gyro/vec.hpp"

namespace gyro {

/// kappa(gamma) = integral over R^2 of (1+|y|)^{-gamma} dy
///              = 2 pi / ((gamma-1)(gamma-2)).
/// Throws std::domain_error for gamma <= 2 (the integral diverges).
double kappa(double gamma);

/// Weighted sup norm value together with the exponent it was taken at.
struct GammaNorm {
  double gamma;
  double value;
  GammaNorm(double g, double v);
};

/// Weighted empirical probability measure on R^4.
class ParticleEnsemble {
 public:
  ParticleEnsemble(std::vector<PhasePoint> points, std::vector<double> weights);

  /// N equal-weight particles.
  static ParticleEnsemble equal_weights(std::vector<PhasePoint> points);

  std::size_t size() const { return points_.size(); }
  const std::vector<PhasePoint>& points() const { return points_; }
  const std::vector<double>& weights() const { return weights_; }
  const PhasePoint& point(std::size_t i) const { return points_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }

  /// True when every weight equals 1/N to within 1e-12.
  bool uniform_weights() const;

  /// Sum of w_i (|x_i| + |v_i|).
  double first_moment() const;

  /// Ensemble with x and v blocks exchanged.
  ParticleEnsemble swapped_xv() const;

  /// Rigid translation of every particle.
  ParticleEnsemble shifted(Vec2 dx, Vec2 dv) const;

 private:
  std::vector<PhasePoint> points_;
  std::vector<double> weights_;
};

/// Snapshot persistence.  One header line (format tag, N, time, eps)
/// followed by one "w x1 x2 v1 v2" record per particle; doubles printed
/// with 17 significant digits so the round-trip is bit exact.
struct SnapshotMeta {
  double time = 0.0;
  double eps = 0.0;
};
void save_snapshot(const ParticleEnsemble& f, const std::string& path,
                   SnapshotMeta meta);
std::pair<ParticleEnsemble, SnapshotMeta> load_snapshot(
    const std::string& path);

/// Nonnegative density sampled at the midpoints of a uniform grid over
/// [-L, L]^4.  Mass lost outside the box is visible through mass(): no
/// silent renormalisation happens anywhere.
class GridDensity {
 public:
  GridDensity(double half_width, int cells_per_axis,
              std::vector<double> values);

  /// Sample a density function at cell centers.  supersample > 1 averages
  /// that many points per axis inside every cell (for kinked profiles).
  static GridDensity from_function(
      const std::function<double(PhasePoint)>& f, double half_width,
      int cells_per_axis, int supersample = 1);

  double half_width() const { return half_width_; }
  int cells_per_axis() const { return n_; }
  double cell_width() const { return 2.0 * half_width_ / n_; }
  double cell_volume() const;
  std::size_t cell_count() const { return values_.size(); }
  const std::vector<double>& values() const { return values_; }

  /// Center coordinate of index i along one axis.
  double axis_center(int i) const {
    return -half_width_ + (i + 0.5) * cell_width();
  }
  PhasePoint center(std::size_t flat) const;

  /// Total mass contained in the box (midpoint quadrature).
  double mass() const { return mass_; }

  /// Midpoint L^p norm for p in [1, inf]; pass infinity for the cell max.
  double lp_norm(double p) const;

  /// Cell-center sup of (1+|x|)^gamma (1+|v|)^gamma f.  gamma > 2.
  GammaNorm gamma_norm(double gamma) const;

  /// Flat list of (center, mass) for cells with nonzero value; cached.
  struct Atom {
    PhasePoint z;
    double mass;
  };
  const std::vector<Atom>& atoms() const;

 private:
  double half_width_;
  int n_;
  std::vector<double> values_;
  double mass_;
  mutable std::vector<Atom> atoms_;
};

/// Catalog of initial conditions f0 in P_1 with the decay the flow bounds
/// require.  All densities are normalised to unit mass on R^4.
class InitialCondition {
 public:
  enum class Kind { gaussian, polynomial, uniform_box, two_bump };

  static InitialCondition gaussian(double sigma = 0.4, double trunc = 3.0);
  static InitialCondition polynomial(double a = 4.0);
  static InitialCondition uniform_box(double half = 1.0);
  /// Flat-top radial bumps: plateau radius r0, support radius r1, x-centers
  /// at (+-offset, 0), v centered at the origin.
  static InitialCondition two_bump(double offset = 0.8, double r0 = 0.45,
                                   double r1 = 0.95);
  static InitialCondition parse(const std::string& name);

  Kind kind() const { return kind_; }

  double density(PhasePoint z) const;
  ParticleEnsemble sample(std::size_t n, std::uint64_t seed) const;

  /// Peak density value.
  double linf() const;
  /// Mass (1 for every catalog member; kept explicit for reports).
  double l1() const { return 1.0; }
  /// Euclidean distance from z to the support; 0 inside, 0 everywhere for
  /// members with unbounded support (no pruning possible).
  double support_distance(PhasePoint z) const;
  bool compact_support() const;

  /// Density translated by (dx, dv); used for perturbed twins.
  InitialCondition shifted(Vec2 dx, Vec2 dv) const;
  Vec2 shift_x() const { return shift_x_; }

 private:
  InitialCondition() = default;
  Kind kind_ = Kind::gaussian;
  double sigma_ = 0.4, trunc_radius_ = 1.2;  // gaussian / two_bump velocity
  double a_ = 4.0;                           // polynomial exponent
  double box_half_ = 1.0;                    // uniform box
  double offset_ = 0.8, r0_ = 0.45, r1_ = 0.95;
  Vec2 shift_x_{0, 0}, shift_v_{0, 0};
  double plateau_mass_2d() const;
};

}  // namespace gyro

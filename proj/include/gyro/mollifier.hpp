#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <vector>

#include "gyro/measures.hpp"
#include "gyro/vec.hpp"

namespace gyro {

class RingMassGrid;
class ForceKernelGrid;

/// The radial C^inf bump chi(y) = C exp(-1/(1-|y|^2)) on the unit ball,
/// normalised to unit mass over R^2.  Owns the precomputed lookup grids
/// shared by every mollification scale (both the ring-mass and the
/// mollified-kernel integrals depend on lengths only through ratios to
/// eps, so one scaled table serves all eps).
class BumpProfile {
 public:
  BumpProfile();

  double normalization() const { return c_; }
  /// chi0(r): radial profile value, zero for r >= 1.
  double radial(double r) const;
  double value(Vec2 u) const { return radial(u.norm()); }
  /// sup of chi.
  double max_value() const { return chi_max_; }
  /// sup of |grad chi|.
  double max_gradient() const { return grad_max_; }
  /// integral of |y| chi(y) dy.
  double mean_radius() const { return mean_radius_; }

  /// 2 pi int_0^R chi0(r) r dr  (radial mass cdf; equals 1 at R >= 1).
  double radial_mass(double R) const;
  /// Inverse of radial_mass on [0, 1] (for sampling from chi).
  double radial_mass_inverse(double u) const;

  /// Mass of the bump centered at distance a from the origin inside the
  /// disc of radius b, by direct quadrature (slow, high accuracy).
  double disc_mass(double a, double b) const;

  const RingMassGrid& ring_grid() const;
  const ForceKernelGrid& kernel_grid() const;

  static std::shared_ptr<const BumpProfile> standard();

 private:
  double c_ = 0.0;
  double chi_max_ = 0.0;
  double grad_max_ = 0.0;
  double mean_radius_ = 0.0;
  std::vector<double> cdf_;  // radial_mass at uniform r-nodes
  mutable std::once_flag ring_once_, kernel_once_;
  mutable std::unique_ptr<RingMassGrid> ring_;
  mutable std::unique_ptr<ForceKernelGrid> kernel_;
};

/// Bilinear table of the scaled ring mass
///   M(a, b) = mass of the unit bump at distance a inside the disc of
///             radius b,
/// on axes xi = 1/(1+a) and tau = b - a in [-1, 1].  M is exactly 0 for
/// tau <= -1 and 1 for tau >= 1.
class RingMassGrid {
 public:
  RingMassGrid(const BumpProfile& profile, int n_xi = 512, int n_tau = 2048);
  double mass(double a, double b) const;

 private:
  int nxi_, ntau_;
  std::vector<double> table_;
};

/// Catmull-Rom table of the scaled mollified force kernel.  In eps = 1
/// units the kernel at (|x|, |v|) = (a, b) equals jhat(a, b) perp(x)/|x|;
/// the table stores (1+a) jhat on axes xi = 1/(1+a), tau = b - a.
/// Outside |tau| < 2 the mollification is invisible: jhat = 1/(2 pi a)
/// for tau <= -2 (the harmonic mean-value property) and 0 for tau >= 2
/// (fully screened).
class ForceKernelGrid {
 public:
  ForceKernelGrid(const BumpProfile& profile, int n_xi = 512,
                  int n_tau_inner = 4001);

  /// jhat(a, b) for any a, b >= 0.
  double scalar(double a, double b) const;

 private:
  double row_interp(int i, int j, double ftau) const;
  int nxi_, ntau_;
  double tau0_, dtau_;
  std::vector<double> table_;
};

/// Mollification family member: profile chi, scale eps, quadrature order.
/// chi_eps(x, v) = eps^-4 chi(x/eps) chi(v/eps).
class MollifierSpec {
 public:
  explicit MollifierSpec(
      double eps, int quad_order = 32,
      std::shared_ptr<const BumpProfile> profile = BumpProfile::standard());

  double epsilon() const { return eps_; }
  int quadrature_order() const { return order_; }
  const BumpProfile& profile() const { return *profile_; }
  std::shared_ptr<const BumpProfile> profile_ptr() const { return profile_; }

  /// chi_eps at z.
  double density(PhasePoint z) const;

  /// m_eps(|v|, r): mass of the eps-mollifier centered at v inside the
  /// disc of radius r (table lookup).
  double ring_mass(double vnorm, double r) const;

  /// Mollified force kernel by factorized quadrature: the 2D outer
  /// integral in polar coordinates around the origin (the Jacobian
  /// cancels the 1/|y| singularity) times the ring-mass factor.
  Vec2 mollified_force(PhasePoint z) const;

  /// Same kernel through the shared scaled table; this is the evaluation
  /// the field sums and the dynamics use.
  Vec2 mollified_force_fast(Vec2 dx, Vec2 dv) const;

  /// pi ||chi||_inf / eps  >= sup |J_eps|.
  double force_sup_bound() const;
  /// pi ||grad chi||_inf / eps^2  >= sup |grad J_eps| (per block).
  double force_gradient_bound() const;

 private:
  double eps_;
  int order_;
  std::shared_ptr<const BumpProfile> profile_;
};

/// Spec-level view of the ring-mass factor at a fixed scale.
class RingMassTable {
 public:
  RingMassTable(double eps, std::shared_ptr<const BumpProfile> profile =
                                BumpProfile::standard());
  double eps() const { return eps_; }
  double mass(double vnorm, double r) const;

 private:
  double eps_;
  std::shared_ptr<const BumpProfile> profile_;
};

/// Displace every particle by an independent draw from chi_eps.  The
/// identity pairing then couples input and output at cost < sqrt(2) eps
/// per sample and below 2 eps in expectation.
ParticleEnsemble jitter_ensemble(const ParticleEnsemble& f,
                                 const MollifierSpec& spec,
                                 std::uint64_t seed);

}  // namespace gyro

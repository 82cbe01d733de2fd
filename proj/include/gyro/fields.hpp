#pragma once

#include <cstddef>
#include <vector>

#include "gyro/measures.hpp"
#include "gyro/mollifier.hpp"
#include "gyro/vec.hpp"

namespace gyro {

/// The two mean-field advection blocks at a query point.
struct FieldPair {
  Vec2 velocity;      // drift of the position block
  Vec2 acceleration;  // drift of the velocity block
};

/// Kernel dispatcher shared by every field sum: exact screened kernel for
/// eps = 0, shared-table mollified kernel otherwise.
class KernelContext {
 public:
  /// Exact (eps = 0) kernel.
  KernelContext() : eps_(0.0), grid_(nullptr) {}
  explicit KernelContext(const MollifierSpec& spec)
      : eps_(spec.epsilon()), grid_(&spec.profile().kernel_grid()) {}

  double eps() const { return eps_; }
  bool mollified() const { return grid_ != nullptr; }

  /// Force kernel evaluated at the separation (d1, d2).
  Vec2 force(Vec2 d1, Vec2 d2) const;

  /// Velocity kernel at (dx, dv) and acceleration kernel at the swapped
  /// separation, sharing the two norms.
  void pair(Vec2 dx, Vec2 dv, Vec2& ju, Vec2& ja) const;

 private:
  double eps_;
  const ForceKernelGrid* grid_;
};

/// U[f](z), A[f](z) for an empirical measure: direct weighted sums over
/// the particles.  skip omits one source index (self-interaction).
FieldPair eval_fields(const ParticleEnsemble& f, PhasePoint z,
                      const KernelContext& kernel,
                      std::ptrdiff_t skip = -1);

/// Same for a grid density: midpoint quadrature of the convolution over
/// the nonzero cells, with local cell subdivision near the query so the
/// quadrature atoms do not masquerade as point charges.
FieldPair eval_fields(const GridDensity& f, PhasePoint z,
                      const KernelContext& kernel);

/// Batch over query points (parallel; each query sums sources in a fixed
/// order, so results are independent of the thread count).
std::vector<FieldPair> eval_fields_batch(const ParticleEnsemble& f,
                                         const std::vector<PhasePoint>& zs,
                                         const KernelContext& kernel,
                                         int threads = 0);
std::vector<FieldPair> eval_fields_batch(const GridDensity& f,
                                         const std::vector<PhasePoint>& zs,
                                         const KernelContext& kernel,
                                         int threads = 0);

/// c ||f||_inf^{1/4} ||f||_1^{3/4} with c = 2^{5/4} / (3 sqrt(pi)); valid
/// for every mollification scale, including none.
double field_sup_bound(double l1, double linf);

/// Numerical constant c of the sup bound.
double field_bound_constant();

/// 3 kappa_gamma ||f||_gamma: Lipschitz constant of both fields in the
/// metric |x - x*| + |v - v*|.
double field_lip_bound(double gamma_norm, double gamma);

}  // namespace gyro

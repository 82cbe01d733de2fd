#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gyro/fields.hpp"
#include "gyro/measures.hpp"
#include "gyro/mollifier.hpp"

namespace gyro {

struct FlowOptions {
  double horizon = 1.0;
  double dt = 1.0 / 200.0;
  int threads = 0;
  /// A step moving any particle further than guard_cells * cell_width
  /// aborts the run.
  double guard_cell_width = 0.25;
  int guard_cells = 10;
};

/// Raised when the step guard trips or the unmollified dynamics gets too
/// close to the kernel singularity.
struct FlowGuardError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Time-indexed trajectories of the self-consistent particle system, with
/// the stage derivatives needed for dense output.
class FlowTrace {
 public:
  double dt() const { return dt_; }
  double horizon() const { return times_.back(); }
  double eps() const { return eps_; }
  std::size_t steps() const { return times_.size() - 1; }
  std::size_t particles() const { return weights_.size(); }
  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<PhasePoint>& state(std::size_t k) const {
    return states_[k];
  }
  const KernelContext& kernel() const { return kernel_; }

  /// Particle positions at any time in [0, horizon] (cubic Hermite in
  /// time between stored steps).
  std::vector<PhasePoint> positions_at(double t) const;

  /// Weighted ensemble at a stored-step time.
  ParticleEnsemble ensemble_at(double t) const;

  /// Advection field of the interpolated ensemble at (z, t).
  FieldPair field_at(PhasePoint z, double t) const;

  /// Largest |velocity| / |acceleration| seen at any stage.
  double max_field() const { return max_field_; }

  /// Trace persistence: header plus one ensemble block per stored step
  /// stride.
  void save(const std::string& path, std::size_t stride = 1) const;

 private:
  friend FlowTrace integrate_flow(const ParticleEnsemble&,
                                  const MollifierSpec&, const FlowOptions&);
  friend FlowTrace integrate_flow_unmollified(const ParticleEnsemble&,
                                              const FlowOptions&);
  friend FlowTrace integrate_generic(const ParticleEnsemble&, KernelContext,
                                     double, const FlowOptions&);
  std::vector<double> times_;
  std::vector<std::vector<PhasePoint>> states_;
  std::vector<std::vector<PhasePoint>> derivs_;
  std::vector<double> weights_;
  double dt_ = 0.0;
  double eps_ = 0.0;
  double max_field_ = 0.0;
  KernelContext kernel_;
};

/// Transport f0 by its own mollified field (classical RK4, fields
/// re-evaluated from the stage positions of all particles).
FlowTrace integrate_flow(const ParticleEnsemble& f0, const MollifierSpec& m,
                         const FlowOptions& opts);

/// The eps = 0 dynamics.  Experimental: atomic measures lose the
/// Lipschitz guarantee, so close encounters abort.
FlowTrace integrate_flow_unmollified(const ParticleEnsemble& f0,
                                     const FlowOptions& opts);

struct ReverseQuery {
  std::vector<PhasePoint> preimages;
  std::vector<double> residuals;  // |Z_t(Z_t^{-1}(z)) - z| per query
  double max_residual = 0.0;
};

/// Preimages under the flow map at time t: integrate the time-reversed
/// field using the stored trajectories (dense output between steps).
ReverseQuery reverse_flow(const FlowTrace& trace, double t,
                          const std::vector<PhasePoint>& queries,
                          double dt_rev = 0.0, int threads = 0,
                          bool compute_residuals = true);

struct SemilagReport {
  std::size_t pruned = 0;         // cells skipped by the displacement bound
  std::size_t out_of_trust = 0;   // preimages outside the box + margin
};

/// Pushforward density at time t on a grid: f_t(z) = f0(Z_t^{-1}(z)) at
/// cell centers.  Cells provably outside the reachable support (initial
/// support widened by the trajectory displacement bound) are skipped.
GridDensity semilag_density(const InitialCondition& f0, const FlowTrace& trace,
                            double t, double half_width, int cells_per_axis,
                            double dt_rev = 0.0, int threads = 0,
                            SemilagReport* report = nullptr);

/// (1 + factor c ||f0||_inf^{1/4} ||f0||_1^{3/4} t)^{2 gamma} ||f0||_gamma.
/// factor 2 is the a-priori transport variant, factor 1 the mollified one.
double gamma_norm_growth_bound(double f0_linf, double f0_l1, double f0_gamma,
                               double gamma, double t, int factor);

}  // namespace gyro

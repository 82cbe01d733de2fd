#pragma once

#include <vector>

#include "gyro/flow.hpp"
#include "gyro/measures.hpp"

namespace gyro {

/// Pairing between two equal-size uniform-weight ensembles: particle i of
/// the source is matched with particle pairing[i] of the target.
struct Coupling {
  std::vector<int> pairing;
  double cost = 0.0;

  std::size_t size() const { return pairing.size(); }
  static Coupling identity(std::size_t n);
};

/// Transport cost of a given pairing under the Euclidean R^4 ground
/// metric, weighted by the source weights.
double coupling_cost(const Coupling& c, const ParticleEnsemble& mu,
                     const ParticleEnsemble& nu);

/// Exact Wasserstein-1 distance with an optimal pairing (Hungarian
/// shortest-augmenting-path assignment on the dense cost matrix).
/// Requires equal particle counts and uniform weights.
Coupling w1_exact(const ParticleEnsemble& mu, const ParticleEnsemble& nu);

/// The transported pairing at time t: particle i of the first flow is
/// coupled with the time-t image of its initial partner under the second
/// flow.  Its cost upper-bounds W1 of the two time-t ensembles.
Coupling compose_transport(const Coupling& t0, const FlowTrace& flow_f,
                           const FlowTrace& flow_g, double t);

/// Q(t) along a list of times, plus the running-supremum variant
/// (the per-particle sup over s <= t of the pair distance, then averaged).
struct TransportCostSeries {
  std::vector<double> times;
  std::vector<double> q;
  std::vector<double> q_running;
};
TransportCostSeries transport_cost_series(const Coupling& t0,
                                          const FlowTrace& flow_f,
                                          const FlowTrace& flow_g,
                                          const std::vector<double>& times);

enum class StabilityConstant { six, six_sqrt2 };

/// w1_0 * exp(variant * kappa_gamma * norm_integral), where norm_integral
/// is int_0^t (||f_s||_gamma + ||g_s||_gamma) ds.
double stability_envelope(double w1_0, double gamma, double norm_integral,
                          StabilityConstant variant = StabilityConstant::six_sqrt2);

/// Two-scale comparison envelope (eps + eps') exp(C' (1 + alpha t)^{2g+1})
/// with alpha = c f0_linf^{1/4}, C = 12 * 2^{2g} pi kappa_g f0_gamma and
/// C' = C / (2 g alpha).  The plain value overflows to +inf for realistic
/// parameters; the log form is exact.
double cauchy_envelope(double eps, double eps_prime, double gamma,
                       double f0_gamma, double f0_linf, double t);
double cauchy_envelope_log(double eps, double eps_prime, double gamma,
                           double f0_gamma, double f0_linf, double t);

}  // namespace gyro

#pragma once

#include <string>
#include <vector>

#include "gyro/config.hpp"
#include "gyro/flow.hpp"
#include "gyro/transport.hpp"

namespace gyro {

/// One row of the stability report.
struct StabilityRow {
  double t;
  double q;
  double w1;
  double envelope;       // may be +inf when the exponent overflows
  double norm_integral;
  double log_envelope;   // exact even when envelope overflows
};

struct StabilityResult {
  std::vector<StabilityRow> rows;
  bool violated = false;  // some Q(t) exceeded the envelope
  std::vector<std::string> files;
};

/// Integrate the base and perturbed solutions at the primary epsilon,
/// couple them optimally at t = 0, transport the coupling, and compare
/// the measured cost against the Gronwall envelope built from measured
/// gamma norms.  Reports and snapshots are written under cfg.out_dir.
StabilityResult run_stability(const ScenarioConfig& cfg);

struct SweepPairRow {
  double t;
  double eps;
  double eps_prime;
  double w1;
  double log_envelope;
};

struct SweepResult {
  std::vector<SweepPairRow> rows;
  std::vector<double> final_w1;    // one per consecutive pair, at t = T
  double slope = 0.0;              // log-log fit of final_w1 against eps
  bool monotone = false;
  bool violated = false;
  std::vector<std::string> files;
};

/// Integrate the same initial ensemble at every scale in the sweep list
/// and measure the pairwise Wasserstein distances between consecutive
/// scales, their decay rate, and the comparison envelope.
SweepResult run_epsilon_sweep(const ScenarioConfig& cfg);

struct NormRow {
  double t;
  double l1, l2, linf;
  double drift1, drift2, driftinf;
  double gamma_norm;
  double gamma_bound;
  std::size_t out_of_trust;
};

struct NormCheckResult {
  std::vector<NormRow> rows;
  bool violated = false;
  std::vector<std::string> files;
};

/// Pushforward densities at the configured times; L^p drift table and the
/// gamma-norm growth check.
NormCheckResult run_norm_checks(const ScenarioConfig& cfg);

/// Measured gamma norms of a flow at given times, through pushforward
/// densities on the norm grid.
std::vector<double> gamma_norms_along_flow(const InitialCondition& ic,
                                           const FlowTrace& trace,
                                           const std::vector<double>& times,
                                           const ScenarioConfig& cfg);

/// Piecewise-linear cumulative integral of (values over nodes), evaluated
/// at query points.  Nodes must be increasing and cover the queries.
std::vector<double> cumulative_trapezoid_at(const std::vector<double>& nodes,
                                            const std::vector<double>& values,
                                            const std::vector<double>& queries);

}  // namespace gyro

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gyro/measures.hpp"
#include "gyro/transport.hpp"

namespace gyro {

/// Flat key = value scenario description.  Unknown keys are rejected;
/// every value is typed and validated.
struct ScenarioConfig {
  // initial condition
  std::string initial_kind = "two_bump";
  double initial_sigma = 0.4;       // gaussian
  double initial_trunc = 3.0;       // gaussian, in units of sigma
  double initial_a = 4.0;           // polynomial
  double initial_box_half = 1.0;    // uniform_box
  double initial_offset = 0.8;      // two_bump
  double initial_r0 = 0.45;
  double initial_r1 = 0.95;

  // perturbation for two-solution runs
  std::string perturb_kind = "none";  // none | shift
  double perturb_shift = 0.01;        // x1 translation

  double gamma = 3.0;
  double epsilon = 0.1;                      // primary scale
  std::vector<double> epsilon_sweep = {0.4, 0.2, 0.1, 0.05};
  std::size_t particles = 1000;
  double horizon = 1.0;
  double dt = 1.0 / 200.0;
  double grid_half_width = 4.0;
  int grid_cells = 32;
  int norm_grid_cells = 16;          // gamma-norm estimation grid
  std::size_t snapshot_stride = 20;  // steps between report rows
  double norm_time_step = 0.25;      // spacing of gamma-norm estimates
  std::vector<double> semilag_times = {0.0, 0.5, 1.0};
  double reverse_dt = 0.04;          // reverse integration step
  std::uint64_t seed = 42;
  int threads = 0;
  int mollifier_order = 32;
  int flow_guard_cells = 10;
  std::string stability_constant = "6sqrt2";  // or "6"
  int propagation_factor = 2;                 // or 1
  std::string out_dir = "out";

  static ScenarioConfig from_file(const std::string& path);
  static ScenarioConfig from_string(const std::string& text);
  void set(const std::string& key, const std::string& value);
  void validate() const;

  InitialCondition initial_condition() const;
  StabilityConstant stability_variant() const;

  /// Canonical serialization (sorted keys) and its FNV-1a hash.
  std::string canonical() const;
  std::string hash() const;
};

}  // namespace gyro

#include "gyro/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <stdexcept>

#include <json.hpp>

namespace gyro {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

constexpr const char* kCodeVersion = "0.1.0";

std::vector<double> snapshot_times(const ScenarioConfig& cfg) {
  std::vector<double> out;
  const std::size_t steps =
      static_cast<std::size_t>(std::llround(cfg.horizon / cfg.dt));
  for (std::size_t k = 0; k <= steps; k += cfg.snapshot_stride)
    out.push_back(k * cfg.dt);
  if (std::abs(out.back() - cfg.horizon) > 1e-12) out.push_back(cfg.horizon);
  return out;
}

std::vector<double> norm_times(const ScenarioConfig& cfg) {
  std::vector<double> out;
  for (double t = 0.0; t < cfg.horizon - 1e-12; t += cfg.norm_time_step)
    out.push_back(t);
  out.push_back(cfg.horizon);
  return out;
}

FlowOptions flow_options(const ScenarioConfig& cfg) {
  FlowOptions o;
  o.horizon = cfg.horizon;
  o.dt = cfg.dt;
  o.threads = cfg.threads;
  o.guard_cells = cfg.flow_guard_cells;
  o.guard_cell_width = 2.0 * cfg.grid_half_width / cfg.grid_cells;
  return o;
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - t0)
        .count();
  }
};

void write_manifest(const ScenarioConfig& cfg, const std::string& runner,
                    const std::vector<std::string>& files, double wall_ms) {
  json m;
  m["config_hash"] = cfg.hash();
  m["code_version"] = kCodeVersion;
  m["runner"] = runner;
  m["wall_ms"] = wall_ms;
  json list = json::array();
  for (const auto& f : files) {
    json e;
    e["path"] = f;
    e["bytes"] = fs::exists(f) ? static_cast<std::uint64_t>(fs::file_size(f)) : 0;
    list.push_back(e);
  }
  m["files"] = list;
  const std::string path = cfg.out_dir + "/manifest.json";
  std::FILE* out = std::fopen(path.c_str(), "w");
  if (!out) throw std::runtime_error("cannot write manifest: " + path);
  const std::string text = m.dump(2);
  std::fwrite(text.data(), 1, text.size(), out);
  std::fputc('\n', out);
  std::fclose(out);
}

std::string snapshot_name(const std::string& dir, const char* tag,
                          std::size_t k) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s/snapshots/%s_%04zu.txt", dir.c_str(), tag,
                k);
  return buf;
}

}  // namespace

std::vector<double> cumulative_trapezoid_at(const std::vector<double>& nodes,
                                            const std::vector<double>& values,
                                            const std::vector<double>& queries) {
  if (nodes.size() != values.size() || nodes.size() < 2)
    throw std::invalid_argument("cumulative integral: bad node list");
  // cumulative at the nodes
  std::vector<double> cum(nodes.size(), 0.0);
  for (std::size_t i = 1; i < nodes.size(); ++i)
    cum[i] = cum[i - 1] +
             0.5 * (values[i] + values[i - 1]) * (nodes[i] - nodes[i - 1]);
  std::vector<double> out;
  out.reserve(queries.size());
  for (double t : queries) {
    if (t < nodes.front() - 1e-9 || t > nodes.back() + 1e-9)
      throw std::invalid_argument("cumulative integral: query out of range");
    const double tc = std::clamp(t, nodes.front(), nodes.back());
    std::size_t i = 1;
    while (i + 1 < nodes.size() && nodes[i] < tc) ++i;
    const double h = nodes[i] - nodes[i - 1];
    const double th = (tc - nodes[i - 1]) / h;
    const double vmid = values[i - 1] + (values[i] - values[i - 1]) * th;
    out.push_back(cum[i - 1] + 0.5 * (values[i - 1] + vmid) * th * h);
  }
  return out;
}

std::vector<double> gamma_norms_along_flow(const InitialCondition& ic,
                                           const FlowTrace& trace,
                                           const std::vector<double>& times,
                                           const ScenarioConfig& cfg) {
  std::vector<double> out;
  out.reserve(times.size());
  for (double t : times) {
    if (t < 1e-14) {
      const GridDensity g = GridDensity::from_function(
          [&](PhasePoint z) { return ic.density(z); }, cfg.grid_half_width,
          cfg.norm_grid_cells);
      out.push_back(g.gamma_norm(cfg.gamma).value);
    } else {
      const GridDensity g =
          semilag_density(ic, trace, t, cfg.grid_half_width,
                          cfg.norm_grid_cells, cfg.reverse_dt, cfg.threads);
      out.push_back(g.gamma_norm(cfg.gamma).value);
    }
  }
  return out;
}

StabilityResult run_stability(const ScenarioConfig& cfg) {
  Timer timer;
  cfg.validate();
  fs::create_directories(cfg.out_dir + "/snapshots");

  const InitialCondition ic = cfg.initial_condition();
  const ParticleEnsemble f0 = ic.sample(cfg.particles, cfg.seed);
  const Vec2 shift = cfg.perturb_kind == "shift"
                         ? Vec2{cfg.perturb_shift, 0.0}
                         : Vec2{0.0, 0.0};
  const ParticleEnsemble g0 = f0.shifted(shift, {0, 0});
  const InitialCondition ic_g = ic.shifted(shift, {0, 0});

  const Coupling t0 = w1_exact(f0, g0);

  const MollifierSpec spec(cfg.epsilon, cfg.mollifier_order);
  const FlowOptions opts = flow_options(cfg);
  const FlowTrace tf = integrate_flow(f0, spec, opts);
  const FlowTrace tg = integrate_flow(g0, spec, opts);

  const std::vector<double> snaps = snapshot_times(cfg);
  const TransportCostSeries qs = transport_cost_series(t0, tf, tg, snaps);

  // measured gamma norms on the coarse norm-time grid, then the
  // cumulative integral at the report times
  const std::vector<double> nts = norm_times(cfg);
  const std::vector<double> nf = gamma_norms_along_flow(ic, tf, nts, cfg);
  const std::vector<double> ng = gamma_norms_along_flow(ic_g, tg, nts, cfg);
  std::vector<double> sum(nts.size());
  for (std::size_t i = 0; i < nts.size(); ++i) sum[i] = nf[i] + ng[i];
  const std::vector<double> ni = cumulative_trapezoid_at(nts, sum, snaps);

  const double kvar = cfg.stability_variant() == StabilityConstant::six
                          ? 6.0
                          : 6.0 * std::sqrt(2.0);
  const double kg = kappa(cfg.gamma);

  StabilityResult res;
  for (std::size_t k = 0; k < snaps.size(); ++k) {
    StabilityRow row;
    row.t = snaps[k];
    row.q = qs.q[k];
    row.w1 = w1_exact(tf.ensemble_at(snaps[k]), tg.ensemble_at(snaps[k])).cost;
    row.norm_integral = ni[k];
    const double log_env = std::log(std::max(t0.cost, 1e-300)) +
                           kvar * kg * ni[k];
    row.log_envelope = log_env;
    row.envelope = t0.cost == 0.0 ? 0.0 : std::exp(log_env);
    res.rows.push_back(row);
    const bool ok =
        t0.cost == 0.0
            ? row.q <= 1e-12
            : std::log(std::max(row.q, 1e-300)) <= log_env + 1e-9;
    if (!ok) res.violated = true;
  }

  // reports and snapshots
  const std::string csv = cfg.out_dir + "/stability.csv";
  std::FILE* out = std::fopen(csv.c_str(), "w");
  if (!out) throw std::runtime_error("cannot write " + csv);
  std::fprintf(out, "t,Q,W1,envelope,norm_integral\n");
  for (const auto& r : res.rows)
    std::fprintf(out, "%.17g,%.17g,%.17g,%.17g,%.17g\n", r.t, r.q, r.w1,
                 r.envelope, r.norm_integral);
  std::fclose(out);
  res.files.push_back(csv);

  const std::string pairing = cfg.out_dir + "/pairing.csv";
  out = std::fopen(pairing.c_str(), "w");
  if (!out) throw std::runtime_error("cannot write " + pairing);
  std::fprintf(out, "i,j\n");
  for (std::size_t i = 0; i < t0.size(); ++i)
    std::fprintf(out, "%zu,%d\n", i, t0.pairing[i]);
  std::fclose(out);
  res.files.push_back(pairing);

  for (std::size_t k = 0; k < snaps.size(); ++k) {
    const std::string pf = snapshot_name(cfg.out_dir, "f", k);
    const std::string pg = snapshot_name(cfg.out_dir, "g", k);
    save_snapshot(tf.ensemble_at(snaps[k]), pf, {snaps[k], cfg.epsilon});
    save_snapshot(tg.ensemble_at(snaps[k]), pg, {snaps[k], cfg.epsilon});
    res.files.push_back(pf);
    res.files.push_back(pg);
  }
  write_manifest(cfg, "run-stability", res.files, timer.ms());
  return res;
}

SweepResult run_epsilon_sweep(const ScenarioConfig& cfg) {
  Timer timer;
  cfg.validate();
  if (cfg.epsilon_sweep.size() < 2)
    throw std::invalid_argument("sweep: need at least two scales");
  fs::create_directories(cfg.out_dir);

  const InitialCondition ic = cfg.initial_condition();
  const ParticleEnsemble f0 = ic.sample(cfg.particles, cfg.seed);
  const FlowOptions opts = flow_options(cfg);

  std::vector<FlowTrace> traces;
  traces.reserve(cfg.epsilon_sweep.size());
  for (double e : cfg.epsilon_sweep)
    traces.push_back(
        integrate_flow(f0, MollifierSpec(e, cfg.mollifier_order), opts));

  // f0 norms enter only through the comparison envelope
  const GridDensity g0 = GridDensity::from_function(
      [&](PhasePoint z) { return ic.density(z); }, cfg.grid_half_width,
      cfg.norm_grid_cells, 2);
  const double f0_gamma = g0.gamma_norm(cfg.gamma).value;
  const double f0_linf = ic.linf();

  const std::vector<double> snaps = snapshot_times(cfg);
  SweepResult res;
  for (std::size_t p = 0; p + 1 < traces.size(); ++p) {
    const double ea = cfg.epsilon_sweep[p], eb = cfg.epsilon_sweep[p + 1];
    for (double t : snaps) {
      SweepPairRow row;
      row.t = t;
      row.eps = ea;
      row.eps_prime = eb;
      row.w1 =
          w1_exact(traces[p].ensemble_at(t), traces[p + 1].ensemble_at(t)).cost;
      row.log_envelope =
          cauchy_envelope_log(ea, eb, cfg.gamma, f0_gamma, f0_linf, t);
      if (row.w1 > 0.0 && std::log(row.w1) > row.log_envelope)
        res.violated = true;
      res.rows.push_back(row);
      if (std::abs(t - cfg.horizon) < 1e-12) res.final_w1.push_back(row.w1);
    }
  }

  // monotone decay in eps and the log-log rate at the final time
  res.monotone = true;
  for (std::size_t p = 0; p + 1 < res.final_w1.size(); ++p)
    if (!(res.final_w1[p] > res.final_w1[p + 1])) res.monotone = false;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const std::size_t m = res.final_w1.size();
  for (std::size_t p = 0; p < m; ++p) {
    const double x = std::log(cfg.epsilon_sweep[p]);
    const double y = std::log(std::max(res.final_w1[p], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  res.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  if (!res.monotone || res.slope < 0.8) res.violated = true;

  const std::string csv = cfg.out_dir + "/sweep.csv";
  std::FILE* out = std::fopen(csv.c_str(), "w");
  if (!out) throw std::runtime_error("cannot write " + csv);
  std::fprintf(out, "t,eps,eps_prime,w1,log_envelope\n");
  for (const auto& r : res.rows)
    std::fprintf(out, "%.17g,%.17g,%.17g,%.17g,%.17g\n", r.t, r.eps,
                 r.eps_prime, r.w1, r.log_envelope);
  std::fclose(out);
  res.files.push_back(csv);

  const std::string fit = cfg.out_dir + "/sweep_fit.csv";
  out = std::fopen(fit.c_str(), "w");
  if (!out) throw std::runtime_error("cannot write " + fit);
  std::fprintf(out, "slope,monotone\n%.17g,%d\n", res.slope,
               res.monotone ? 1 : 0);
  std::fclose(out);
  res.files.push_back(fit);

  write_manifest(cfg, "sweep-epsilon", res.files, timer.ms());
  return res;
}

NormCheckResult run_norm_checks(const ScenarioConfig& cfg) {
  Timer timer;
  cfg.validate();
  fs::create_directories(cfg.out_dir);

  const InitialCondition ic = cfg.initial_condition();
  const ParticleEnsemble f0 = ic.sample(cfg.particles, cfg.seed);
  const MollifierSpec spec(cfg.epsilon, cfg.mollifier_order);
  const FlowTrace trace = integrate_flow(f0, spec, flow_options(cfg));
  const double inf = std::numeric_limits<double>::infinity();

  NormCheckResult res;
  double base1 = 0, base2 = 0, baseinf = 0, base_gamma = 0;
  for (double t : cfg.semilag_times) {
    SemilagReport rep;
    GridDensity g =
        t < 1e-14
            ? GridDensity::from_function(
                  [&](PhasePoint z) { return ic.density(z); },
                  cfg.grid_half_width, cfg.grid_cells)
            : semilag_density(ic, trace, t, cfg.grid_half_width,
                              cfg.grid_cells, cfg.reverse_dt, cfg.threads,
                              &rep);
    NormRow row;
    row.t = t;
    row.l1 = g.lp_norm(1.0);
    row.l2 = g.lp_norm(2.0);
    row.linf = g.lp_norm(inf);
    row.gamma_norm = g.gamma_norm(cfg.gamma).value;
    row.out_of_trust = rep.out_of_trust;
    if (t < 1e-14) {
      base1 = row.l1;
      base2 = row.l2;
      baseinf = row.linf;
      base_gamma = row.gamma_norm;
    }
    row.drift1 = row.l1 / base1 - 1.0;
    row.drift2 = row.l2 / base2 - 1.0;
    row.driftinf = row.linf / baseinf - 1.0;
    row.gamma_bound = gamma_norm_growth_bound(
        ic.linf(), ic.l1(), base_gamma, cfg.gamma, t, cfg.propagation_factor);
    res.rows.push_back(row);
    if (std::abs(row.drift1) > 0.01 || std::abs(row.drift2) > 0.01 ||
        std::abs(row.driftinf) > 0.01)
      res.violated = true;
    if (row.gamma_norm > row.gamma_bound * (1.0 + 1e-12)) res.violated = true;
  }

  const std::string csv = cfg.out_dir + "/norms.csv";
  std::FILE* out = std::fopen(csv.c_str(), "w");
  if (!out) throw std::runtime_error("cannot write " + csv);
  std::fprintf(out,
               "t,l1,l2,linf,drift1,drift2,driftinf,gamma_norm,gamma_bound,"
               "out_of_trust\n");
  for (const auto& r : res.rows)
    std::fprintf(out, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%zu\n",
                 r.t, r.l1, r.l2, r.linf, r.drift1, r.drift2, r.driftinf,
                 r.gamma_norm, r.gamma_bound, r.out_of_trust);
  std::fclose(out);
  res.files.push_back(csv);
  write_manifest(cfg, "check-norms", res.files, timer.ms());
  return res;
}

}  // namespace gyro

#include "gyro/accept.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>

#include "gyro/fields.hpp"
#include "gyro/flow.hpp"
#include "gyro/harness.hpp"
#include "gyro/kernel.hpp"
#include "gyro/measures.hpp"
#include "gyro/mollifier.hpp"
#include "gyro/transport.hpp"
#include "gyro/util/parallel.hpp"
#include "gyro/util/quadrature.hpp"
#include "gyro/util/rng.hpp"

namespace gyro {

namespace {

namespace fs = std::filesystem;

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

/// Default verification scenario: flat-top two-bump data, desk scale.
ScenarioConfig default_scenario(const AcceptanceOptions& opts) {
  ScenarioConfig cfg;
  cfg.initial_kind = "two_bump";
  cfg.particles = 1000;
  cfg.horizon = 1.0;
  cfg.dt = 1.0 / 200.0;
  cfg.epsilon = 0.1;
  cfg.gamma = 3.0;
  cfg.seed = 20260809;
  cfg.threads = opts.threads;
  cfg.out_dir = opts.out_dir;
  return cfg;
}

Vec2 random_vec2(Rng& rng, double lo, double hi) {
  return {rng.uniform(lo, hi), rng.uniform(lo, hi)};
}

Vec2 random_vec2_min_norm(Rng& rng, double lo, double hi, double min_norm) {
  for (;;) {
    const Vec2 u = random_vec2(rng, lo, hi);
    if (u.norm() > min_norm) return u;
  }
}

PhasePoint random_unit4(Rng& rng) {
  for (;;) {
    PhasePoint d{random_vec2(rng, -1, 1), random_vec2(rng, -1, 1)};
    const double n = d.norm();
    if (n > 1e-3 && n <= 1.0) return (1.0 / n) * d;
  }
}

double det4(const double m[4][4]) {
  // expansion by 2x2 complements
  auto d2 = [&](int r0, int r1, int c0, int c1) {
    return m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
  };
  return d2(0, 1, 0, 1) * d2(2, 3, 2, 3) - d2(0, 1, 0, 2) * d2(2, 3, 1, 3) +
         d2(0, 1, 0, 3) * d2(2, 3, 1, 2) + d2(0, 1, 1, 2) * d2(2, 3, 0, 3) -
         d2(0, 1, 1, 3) * d2(2, 3, 0, 2) + d2(0, 1, 2, 3) * d2(2, 3, 0, 1);
}

bool files_identical(const std::string& a, const std::string& b) {
  std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
  if (!fa || !fb) return false;
  std::stringstream sa, sb;
  sa << fa.rdbuf();
  sb << fb.rdbuf();
  return sa.str() == sb.str();
}

// --------------------------------------------------------------------------
// criteria

CriterionResult c1_increment_identity() {
  Rng rng(11);
  double max_rel = 0.0;
  bool amgm = true;
  for (int k = 0; k < 100000; ++k) {
    const Vec2 x = random_vec2_min_norm(rng, -3, 3, 1e-3);
    const Vec2 xs = random_vec2_min_norm(rng, -3, 3, 1e-3);
    const auto [lhs, rhs] = increment_identity(x, xs);
    const double rel = std::abs(lhs - rhs) / std::max(rhs, 1e-300);
    max_rel = std::max(max_rel, rel);
    const double cap = (1.0 / x.norm2() + 1.0 / xs.norm2()) *
                       (x - xs).norm() / 2.0;
    if (rhs > cap * (1.0 + 1e-12)) amgm = false;
  }
  const bool pass = max_rel <= 1e-12 && amgm;
  return {1, "increment-identity-equality", pass,
          fmt("max_rel_err=%.2e amgm=%s", max_rel, amgm ? "ok" : "violated"),
          0};
}

CriterionResult c2_variation_bound() {
  Rng rng(12);
  double worst = -1e300;
  int violations = 0;
  for (int k = 0; k < 100000; ++k) {
    const PhasePoint z{random_vec2_min_norm(rng, -3, 3, 1e-3),
                       random_vec2_min_norm(rng, -3, 3, 1e-3)};
    const PhasePoint zs{random_vec2_min_norm(rng, -3, 3, 1e-3),
                        random_vec2_min_norm(rng, -3, 3, 1e-3)};
    const double lhs = (force_kernel(z) - force_kernel(zs)).norm();
    const double bound = force_variation_bound(z, zs);
    if (lhs > bound * (1.0 + 1e-12) + 1e-300) ++violations;
    worst = std::max(worst, lhs - bound);
  }
  return {2, "force-variation-bound", violations == 0,
          fmt("violations=%d worst_excess=%.2e", violations, worst), 0};
}

CriterionResult c3_kappa() {
  double max_err = 0.0;
  const auto& gl = GaussLegendre::get(128);
  for (double g : {2.5, 3.0, 4.0, 6.0}) {
    // radial integral after u = 1/(1+r), u = s^2: smooth integrand
    const double radial = gl.integrate(0.0, 1.0, [&](double s) {
      return 2.0 * (1.0 - s * s) * std::pow(s, 2.0 * g - 5.0);
    });
    const double oracle = 2.0 * M_PI * radial;
    max_err = std::max(max_err, std::abs(kappa(g) - oracle));
  }
  return {3, "kappa-closed-form", max_err <= 1e-8,
          fmt("max_abs_err=%.2e", max_err), 0};
}

std::vector<GridDensity> catalog_grids() {
  std::vector<GridDensity> grids;
  const std::vector<InitialCondition> cat = {
      InitialCondition::two_bump(), InitialCondition::gaussian(),
      InitialCondition::polynomial(), InitialCondition::uniform_box()};
  for (const auto& ic : cat)
    grids.push_back(GridDensity::from_function(
        [&](PhasePoint z) { return ic.density(z); }, 4.0, 16, 2));
  return grids;
}

CriterionResult c4_field_sup_bound(const AcceptanceOptions& opts) {
  const auto grids = catalog_grids();
  Rng rng(14);
  std::vector<PhasePoint> probes(10000);
  for (auto& z : probes)
    z = {random_vec2(rng, -3, 3), random_vec2(rng, -3, 3)};
  double worst_ratio = 0.0;
  for (const auto& g : grids) {
    const double bound = field_sup_bound(g.mass(), g.lp_norm(
        std::numeric_limits<double>::infinity()));
    for (double e : {0.4, 0.2, 0.1, 0.05, 0.0}) {
      std::optional<MollifierSpec> spec;
      KernelContext kernel;
      if (e > 0.0) {
        spec.emplace(e);
        kernel = KernelContext(*spec);
      }
      const auto fields = eval_fields_batch(g, probes, kernel, opts.threads);
      double sup = 0.0;
      for (const auto& f : fields)
        sup = std::max({sup, f.velocity.norm(), f.acceleration.norm()});
      worst_ratio = std::max(worst_ratio, sup / bound);
    }
  }
  return {4, "field-sup-bound", worst_ratio <= 1.0 + 1e-6,
          fmt("worst sup/bound=%.4f", worst_ratio), 0};
}

CriterionResult c5_field_lipschitz(const AcceptanceOptions& opts) {
  const auto grids = catalog_grids();
  const double gamma = 3.0;
  Rng rng(15);
  const int pairs = 10000;
  std::vector<PhasePoint> za(pairs), zb(pairs);
  for (int k = 0; k < pairs; ++k) {
    za[k] = {random_vec2(rng, -2.5, 2.5), random_vec2(rng, -2.5, 2.5)};
    const double mag = std::pow(10.0, rng.uniform(-3.0, -0.3));
    zb[k] = za[k] + mag * random_unit4(rng);
  }
  double worst_ratio = 0.0;
  const KernelContext exact;
  for (const auto& g : grids) {
    const double bound =
        field_lip_bound(g.gamma_norm(gamma).value, gamma);
    const auto fa = eval_fields_batch(g, za, exact, opts.threads);
    const auto fb = eval_fields_batch(g, zb, exact, opts.threads);
    for (int k = 0; k < pairs; ++k) {
      const double den =
          (za[k].x - zb[k].x).norm() + (za[k].v - zb[k].v).norm();
      const double qu = (fa[k].velocity - fb[k].velocity).norm() / den;
      const double qa =
          (fa[k].acceleration - fb[k].acceleration).norm() / den;
      worst_ratio = std::max(worst_ratio, std::max(qu, qa) / bound);
    }
  }
  return {5, "field-lipschitz-bound", worst_ratio <= 1.0 + 1e-6,
          fmt("worst quotient/bound=%.4f", worst_ratio), 0};
}

CriterionResult c6_mollified_kernel_bounds() {
  double worst_sup = 0.0, worst_lip = 0.0;
  for (double e : {0.4, 0.1}) {
    const MollifierSpec spec(e);
    Rng rng(16);
    const double sup_bound = spec.force_sup_bound();
    const double lip_bound = spec.force_gradient_bound();
    double sup = 0.0;
    for (int k = 0; k < 10000; ++k) {
      const double scale = k % 3 == 0 ? 2.0 : 4.0 * e;
      const PhasePoint z{rng.uniform_disc(scale), rng.uniform_disc(scale)};
      sup = std::max(sup, spec.mollified_force(z).norm());
    }
    worst_sup = std::max(worst_sup, sup / sup_bound);
    double lip = 0.0;
    for (int k = 0; k < 2000; ++k) {
      const PhasePoint z{rng.uniform_disc(3.0 * e), rng.uniform_disc(3.0 * e)};
      const PhasePoint d = (1e-3 * e) * random_unit4(rng);
      const PhasePoint zb = z + d;
      const double den = d.x.norm() + d.v.norm();
      lip = std::max(lip, (spec.mollified_force(z) - spec.mollified_force(zb))
                              .norm() /
                          den);
    }
    worst_lip = std::max(worst_lip, lip / lip_bound);
  }
  const bool pass = worst_sup <= 1.0 + 1e-9 && worst_lip <= 1.0 + 1e-6;
  return {6, "mollified-kernel-bounds", pass,
          fmt("sup/bound=%.3f lip/bound=%.3f", worst_sup, worst_lip), 0};
}

CriterionResult c7_w1_brute_force() {
  Rng rng(17);
  double max_err = 0.0;
  for (int n = 2; n <= 7; ++n) {
    for (int inst = 0; inst < 200; ++inst) {
      std::vector<PhasePoint> a(n), b(n);
      for (auto& z : a) z = {random_vec2(rng, -1, 1), random_vec2(rng, -1, 1)};
      for (auto& z : b) z = {random_vec2(rng, -1, 1), random_vec2(rng, -1, 1)};
      const auto mu = ParticleEnsemble::equal_weights(a);
      const auto nu = ParticleEnsemble::equal_weights(b);
      const double solver = w1_exact(mu, nu).cost;
      std::vector<int> perm(n);
      std::iota(perm.begin(), perm.end(), 0);
      double best = std::numeric_limits<double>::infinity();
      do {
        double c = 0.0;
        for (int i = 0; i < n; ++i) c += (a[i] - b[perm[i]]).norm();
        best = std::min(best, c / n);
      } while (std::next_permutation(perm.begin(), perm.end()));
      max_err = std::max(max_err, std::abs(solver - best));
    }
  }
  return {7, "w1-brute-force", max_err <= 1e-9, fmt("max_abs_err=%.2e", max_err),
          0};
}

CriterionResult c8_mollification_distance() {
  const double e = 0.25;
  const MollifierSpec spec(e);
  Rng rng(18);
  std::vector<PhasePoint> pts(10000);
  for (auto& z : pts) z = {random_vec2(rng, -1, 1), random_vec2(rng, -1, 1)};
  const auto f = ParticleEnsemble::equal_weights(pts);
  const auto g = jitter_ensemble(f, spec, 99);
  double mean = 0.0, worst = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double d = (f.point(i) - g.point(i)).norm();
    worst = std::max(worst, d);
    mean += f.weight(i) * d;
  }
  const bool pass = worst <= 2.0 * std::sqrt(2.0) * e && mean >= 0.0 &&
                    mean <= 2.0 * e;
  return {8, "mollification-distance", pass,
          fmt("per-sample max=%.4f (cap %.4f), mean=%.4f (cap %.4f)", worst,
              2.0 * std::sqrt(2.0) * e, mean, 2.0 * e),
          0};
}

CriterionResult c9_flow_inversion(const AcceptanceOptions& opts,
                                  const FlowTrace& trace,
                                  const InitialCondition& ic) {
  Rng rng(19);
  const int nprobe = 100;
  std::vector<PhasePoint> probes;
  const auto seedcloud = ic.sample(nprobe, 777);
  probes = seedcloud.points();

  const auto rq = reverse_flow(trace, 1.0, probes, 0.0, opts.threads, true);

  // finite-difference Jacobian determinant of the reverse map
  const double h = 1e-4;
  std::vector<PhasePoint> fd;
  fd.reserve(nprobe * 8);
  for (const auto& z : probes) {
    for (int ax = 0; ax < 4; ++ax) {
      for (double sgn : {1.0, -1.0}) {
        PhasePoint p = z;
        double* comp[4] = {&p.x.x, &p.x.y, &p.v.x, &p.v.y};
        *comp[ax] += sgn * h;
        fd.push_back(p);
      }
    }
  }
  const auto rfd = reverse_flow(trace, 1.0, fd, 0.0, opts.threads, false);
  double worst_det = 0.0;
  for (int q = 0; q < nprobe; ++q) {
    double m[4][4];
    for (int ax = 0; ax < 4; ++ax) {
      const PhasePoint& plus = rfd.preimages[q * 8 + ax * 2];
      const PhasePoint& minus = rfd.preimages[q * 8 + ax * 2 + 1];
      const PhasePoint col = (1.0 / (2.0 * h)) * (plus - minus);
      m[0][ax] = col.x.x;
      m[1][ax] = col.x.y;
      m[2][ax] = col.v.x;
      m[3][ax] = col.v.y;
    }
    worst_det = std::max(worst_det, std::abs(det4(m) - 1.0));
  }
  const bool pass = rq.max_residual <= 1e-6 && worst_det <= 1e-3;
  return {9, "flow-inversion-volume", pass,
          fmt("max_residual=%.2e max|det-1|=%.2e", rq.max_residual, worst_det),
          0};
}

CriterionResult c10_lp_conservation(const NormCheckResult& norms) {
  double worst = 0.0;
  for (const auto& r : norms.rows)
    worst = std::max({worst, std::abs(r.drift1), std::abs(r.drift2),
                      std::abs(r.driftinf)});
  return {10, "lp-conservation", worst <= 0.01,
          fmt("max |drift| = %.4f over %zu times", worst, norms.rows.size()),
          0};
}

CriterionResult c11_gamma_propagation(const NormCheckResult& norms) {
  double worst = 0.0;
  bool ok = true;
  for (const auto& r : norms.rows) {
    worst = std::max(worst, r.gamma_norm / r.gamma_bound);
    if (r.gamma_norm > r.gamma_bound * (1.0 + 1e-12)) ok = false;
  }
  return {11, "gamma-norm-propagation", ok,
          fmt("max norm/bound = %.4f", worst), 0};
}

CriterionResult c12_stability(const AcceptanceOptions& opts,
                              std::string& h001_dir) {
  bool ok = true;
  double worst = 0.0;
  for (double h : {0.01, 0.05}) {
    ScenarioConfig cfg = default_scenario(opts);
    cfg.perturb_kind = "shift";
    cfg.perturb_shift = h;
    cfg.out_dir = opts.out_dir + fmt("/stability_h%g", h);
    const StabilityResult res = run_stability(cfg);
    if (res.violated) ok = false;
    for (const auto& r : res.rows)
      if (r.q > 0.0)
        worst = std::max(worst, std::log(r.q) - r.log_envelope);
    if (h == 0.01) h001_dir = cfg.out_dir;
  }
  return {12, "stability-envelope", ok,
          fmt("max log(Q)-log(env) = %.3f (<= 0 required)", worst), 0};
}

CriterionResult c13_epsilon_cauchy(const AcceptanceOptions& opts) {
  ScenarioConfig cfg = default_scenario(opts);
  cfg.epsilon_sweep = {0.4, 0.2, 0.1, 0.05};
  cfg.snapshot_stride = 40;
  cfg.out_dir = opts.out_dir + "/sweep";
  const SweepResult res = run_epsilon_sweep(cfg);
  std::string w1s;
  for (double w : res.final_w1) w1s += fmt(" %.3e", w);
  return {13, "epsilon-cauchy-rate", !res.violated,
          fmt("slope=%.3f monotone=%s w1(T)=%s", res.slope,
              res.monotone ? "yes" : "no", w1s.c_str()),
          0};
}

CriterionResult c14_determinism(const AcceptanceOptions& opts,
                                std::string h001_dir) {
  if (h001_dir.empty()) {
    // standalone invocation: produce the reference run here
    ScenarioConfig ref = default_scenario(opts);
    ref.perturb_kind = "shift";
    ref.perturb_shift = 0.01;
    ref.out_dir = opts.out_dir + "/stability_ref";
    run_stability(ref);
    h001_dir = ref.out_dir;
  }
  ScenarioConfig cfg = default_scenario(opts);
  cfg.perturb_kind = "shift";
  cfg.perturb_shift = 0.01;
  cfg.out_dir = opts.out_dir + "/stability_repeat";
  const StabilityResult res = run_stability(cfg);
  bool ok = true;
  std::size_t checked = 0;
  for (const auto& f : res.files) {
    const std::string rel = f.substr(cfg.out_dir.size());
    if (!files_identical(f, h001_dir + rel)) {
      ok = false;
      break;
    }
    ++checked;
  }
  return {14, "determinism", ok,
          fmt("%zu report/snapshot files bit-identical", checked), 0};
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts) {
  fs::create_directories(opts.out_dir);
  std::vector<CriterionResult> results;
  std::string h001_dir;

  // fixtures shared by the flow criteria
  ScenarioConfig flow_cfg = default_scenario(opts);
  std::optional<FlowTrace> trace;
  std::optional<NormCheckResult> norms;
  auto default_trace = [&]() -> const FlowTrace& {
    if (!trace) {
      const InitialCondition ic = flow_cfg.initial_condition();
      const ParticleEnsemble f0 = ic.sample(flow_cfg.particles, flow_cfg.seed);
      const MollifierSpec spec(flow_cfg.epsilon, flow_cfg.mollifier_order);
      FlowOptions fo;
      fo.horizon = flow_cfg.horizon;
      fo.dt = flow_cfg.dt;
      fo.threads = opts.threads;
      trace = integrate_flow(f0, spec, fo);
    }
    return *trace;
  };
  auto norm_result = [&]() -> const NormCheckResult& {
    if (!norms) {
      ScenarioConfig cfg = default_scenario(opts);
      cfg.out_dir = opts.out_dir + "/norms";
      norms = run_norm_checks(cfg);
    }
    return *norms;
  };

  auto run = [&](int id, const std::function<CriterionResult()>& f) {
    if (opts.only != 0 && opts.only != id) return;
    const auto t0 = std::chrono::steady_clock::now();
    CriterionResult r = f();
    r.seconds = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
    std::printf("[%2d] %-4s %-28s %s  (%.1fs)\n", r.id,
                r.pass ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str(),
                r.seconds);
    std::fflush(stdout);
    results.push_back(std::move(r));
  };

  run(1, [&] { return c1_increment_identity(); });
  run(2, [&] { return c2_variation_bound(); });
  run(3, [&] { return c3_kappa(); });
  run(4, [&] { return c4_field_sup_bound(opts); });
  run(5, [&] { return c5_field_lipschitz(opts); });
  run(6, [&] { return c6_mollified_kernel_bounds(); });
  run(7, [&] { return c7_w1_brute_force(); });
  run(8, [&] { return c8_mollification_distance(); });
  run(9, [&] {
    return c9_flow_inversion(opts, default_trace(),
                             flow_cfg.initial_condition());
  });
  run(10, [&] { return c10_lp_conservation(norm_result()); });
  run(11, [&] { return c11_gamma_propagation(norm_result()); });
  run(12, [&] { return c12_stability(opts, h001_dir); });
  run(13, [&] { return c13_epsilon_cauchy(opts); });
  run(14, [&] { return c14_determinism(opts, h001_dir); });
  return results;
}

bool all_passed(const std::vector<CriterionResult>& results) {
  for (const auto& r : results)
    if (!r.pass) return false;
  return true;
}

}  // namespace gyro

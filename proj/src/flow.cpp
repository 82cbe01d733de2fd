#include "gyro/flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "gyro/util/parallel.hpp"

namespace gyro {

namespace {

/// Derivatives of all particles from the current positions (self term
/// omitted), plus the largest field magnitude seen.
void ensemble_derivative(const std::vector<PhasePoint>& pts,
                         const std::vector<double>& w,
                         const KernelContext& kernel, int threads,
                         std::vector<PhasePoint>& out,
                         std::vector<double>& stage_max) {
  const std::size_t n = pts.size();
  parallel_for(n, threads, [&](std::size_t i) {
    Vec2 u{0, 0}, a{0, 0}, ju, ja;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      kernel.pair(pts[i].x - pts[j].x, pts[i].v - pts[j].v, ju, ja);
      u += w[j] * ju;
      a += w[j] * ja;
    }
    out[i] = {u, a};
    stage_max[i] = std::max(u.norm(), a.norm());
  });
}

}  // namespace

FlowTrace integrate_generic(const ParticleEnsemble& f0, KernelContext kernel,
                            double eps, const FlowOptions& opts) {
  if (!(opts.dt > 0.0) || !(opts.horizon > 0.0))
    throw std::invalid_argument("flow: dt and horizon must be positive");
  const std::size_t n = f0.size();
  const std::size_t steps =
      static_cast<std::size_t>(std::llround(opts.horizon / opts.dt));
  if (steps == 0 || std::abs(steps * opts.dt - opts.horizon) > 1e-9)
    throw std::invalid_argument("flow: horizon must be a multiple of dt");
  const double guard = opts.guard_cells * opts.guard_cell_width;

  FlowTrace tr;
  tr.dt_ = opts.dt;
  tr.eps_ = eps;
  tr.kernel_ = kernel;
  tr.weights_ = f0.weights();
  tr.times_.reserve(steps + 1);
  tr.states_.reserve(steps + 1);
  tr.derivs_.reserve(steps + 1);

  std::vector<PhasePoint> y = f0.points();
  std::vector<PhasePoint> k1(n), k2(n), k3(n), k4(n), tmp(n);
  std::vector<double> stage_max(n);
  double max_field = 0.0;
  auto deriv = [&](const std::vector<PhasePoint>& state,
                   std::vector<PhasePoint>& out) {
    ensemble_derivative(state, tr.weights_, kernel, opts.threads, out,
                        stage_max);
    for (double m : stage_max) max_field = std::max(max_field, m);
  };

  const double dt = opts.dt;
  for (std::size_t s = 0;; ++s) {
    deriv(y, k1);
    tr.times_.push_back(s * dt);
    tr.states_.push_back(y);
    tr.derivs_.push_back(k1);
    if (s == steps) break;

    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
    deriv(tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
    deriv(tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + dt * k3[i];
    deriv(tmp, k4);
    double max_move = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const PhasePoint d =
          (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      max_move = std::max(max_move, d.norm());
      y[i] += d;
      if (!y[i].finite()) throw FlowGuardError("flow: non-finite state");
    }
    if (max_move > guard)
      throw FlowGuardError("flow: step guard tripped (step " +
                           std::to_string(s) + ")");
  }
  tr.max_field_ = max_field;
  return tr;
}

FlowTrace integrate_flow(const ParticleEnsemble& f0, const MollifierSpec& m,
                         const FlowOptions& opts) {
  return integrate_generic(f0, KernelContext(m), m.epsilon(), opts);
}

FlowTrace integrate_flow_unmollified(const ParticleEnsemble& f0,
                                     const FlowOptions& opts) {
  // The exact kernel throws on singular separations; anything surviving
  // integration is an honest trajectory of the eps = 0 system.
  return integrate_generic(f0, KernelContext(), 0.0, opts);
}

std::vector<PhasePoint> FlowTrace::positions_at(double t) const {
  const double T = times_.back();
  if (t < -1e-12 || t > T + 1e-12)
    throw std::invalid_argument("trace: time outside range");
  t = std::clamp(t, 0.0, T);
  const double u = t / dt_;
  std::size_t k = std::min(static_cast<std::size_t>(u), steps() - 1);
  const double th = u - k;
  if (th < 1e-14) return states_[k];
  if (th > 1.0 - 1e-14) return states_[k + 1];
  const double t2 = th * th, t3 = t2 * th;
  const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + th;
  const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  std::vector<PhasePoint> out(particles());
  const auto& p0 = states_[k];
  const auto& p1 = states_[k + 1];
  const auto& m0 = derivs_[k];
  const auto& m1 = derivs_[k + 1];
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = h00 * p0[i] + (h10 * dt_) * m0[i] + h01 * p1[i] +
             (h11 * dt_) * m1[i];
  return out;
}

ParticleEnsemble FlowTrace::ensemble_at(double t) const {
  return ParticleEnsemble(positions_at(t), weights_);
}

FieldPair FlowTrace::field_at(PhasePoint z, double t) const {
  const auto pts = positions_at(t);
  Vec2 u{0, 0}, a{0, 0}, ju, ja;
  for (std::size_t j = 0; j < pts.size(); ++j) {
    kernel_.pair(z.x - pts[j].x, z.v - pts[j].v, ju, ja);
    u += weights_[j] * ju;
    a += weights_[j] * ja;
  }
  return {u, a};
}

void FlowTrace::save(const std::string& path, std::size_t stride) const {
  std::FILE* out = std::fopen(path.c_str(), "w");
  if (!out) throw std::runtime_error("cannot open trace file: " + path);
  stride = std::max<std::size_t>(1, stride);
  std::size_t blocks = 0;
  for (std::size_t k = 0; k < times_.size(); k += stride) ++blocks;
  std::fprintf(out, "# gyro-trace v1 N=%zu eps=%.17g dt=%.17g T=%.17g blocks=%zu\n",
               particles(), eps_, dt_, times_.back(), blocks);
  for (std::size_t k = 0; k < times_.size(); k += stride) {
    std::fprintf(out, "# t=%.17g\n", times_[k]);
    const auto& st = states_[k];
    for (std::size_t i = 0; i < st.size(); ++i)
      std::fprintf(out, "%.17g %.17g %.17g %.17g %.17g\n", weights_[i],
                   st[i].x.x, st[i].x.y, st[i].v.x, st[i].v.y);
  }
  std::fclose(out);
}

namespace {

/// Shared reverse-integration driver: all queries advance in lockstep so
/// each stage interpolates the stored ensemble exactly once.
std::vector<PhasePoint> march(const FlowTrace& trace, double t_from,
                              double t_to, std::vector<PhasePoint> pts,
                              double dt_rev, int threads) {
  const double span = t_to - t_from;
  const double dir = span >= 0.0 ? 1.0 : -1.0;
  const double total = std::abs(span);
  if (total < 1e-15) return pts;
  const std::size_t nsteps =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(total / dt_rev - 1e-12)));
  const double h = dir * total / nsteps;
  const auto& w = trace.weights();
  const auto& kernel = trace.kernel();

  std::vector<PhasePoint> e0, e1, e2;
  auto field = [&](const std::vector<PhasePoint>& src, PhasePoint z) {
    Vec2 u{0, 0}, a{0, 0}, ju, ja;
    for (std::size_t j = 0; j < src.size(); ++j) {
      kernel.pair(z.x - src[j].x, z.v - src[j].v, ju, ja);
      u += w[j] * ju;
      a += w[j] * ja;
    }
    return PhasePoint{u, a};
  };

  double s = t_from;
  for (std::size_t step = 0; step < nsteps; ++step) {
    e0 = trace.positions_at(s);
    e1 = trace.positions_at(s + 0.5 * h);
    e2 = trace.positions_at(s + h);
    parallel_for(pts.size(), threads, [&](std::size_t i) {
      const PhasePoint z = pts[i];
      const PhasePoint k1 = field(e0, z);
      const PhasePoint k2 = field(e1, z + (0.5 * h) * k1);
      const PhasePoint k3 = field(e1, z + (0.5 * h) * k2);
      const PhasePoint k4 = field(e2, z + h * k3);
      pts[i] = z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    });
    s += h;
  }
  return pts;
}

}  // namespace

ReverseQuery reverse_flow(const FlowTrace& trace, double t,
                          const std::vector<PhasePoint>& queries,
                          double dt_rev, int threads,
                          bool compute_residuals) {
  if (dt_rev <= 0.0) dt_rev = trace.dt();
  ReverseQuery out;
  out.preimages = march(trace, t, 0.0, queries, dt_rev, threads);
  if (compute_residuals) {
    const auto forward = march(trace, 0.0, t, out.preimages, dt_rev, threads);
    out.residuals.resize(queries.size());
    for (std::size_t i = 0; i < queries.size(); ++i) {
      out.residuals[i] = (forward[i] - queries[i]).norm();
      out.max_residual = std::max(out.max_residual, out.residuals[i]);
    }
  }
  return out;
}

GridDensity semilag_density(const InitialCondition& f0, const FlowTrace& trace,
                            double t, double half_width, int cells_per_axis,
                            double dt_rev, int threads, SemilagReport* report) {
  if (dt_rev <= 0.0) dt_rev = trace.dt();
  const int n = cells_per_axis;
  const double h = 2.0 * half_width / n;
  const std::size_t total = std::size_t(n) * n * n * n;

  // displacement bound |Z_t^{-1}(z) - z| <= 2 c linf^{1/4} l1^{3/4} t,
  // padded 30% plus one cell diagonal before pruning
  double budget = -1.0;
  if (f0.compact_support()) {
    budget = 2.0 * field_sup_bound(f0.l1(), f0.linf()) * t * 1.3 + 2.0 * h;
  }

  std::vector<double> axis(n);
  for (int i = 0; i < n; ++i) axis[i] = -half_width + (i + 0.5) * h;
  std::vector<PhasePoint> centers;
  std::vector<std::size_t> index;
  centers.reserve(total / 4);
  std::size_t flat = 0, pruned = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l, ++flat) {
          const PhasePoint c{{axis[i], axis[j]}, {axis[k], axis[l]}};
          if (budget >= 0.0 && f0.support_distance(c) > budget) {
            ++pruned;
            continue;
          }
          centers.push_back(c);
          index.push_back(flat);
        }

  auto rq = reverse_flow(trace, t, centers, dt_rev, threads, false);
  std::vector<double> vals(total, 0.0);
  std::size_t out_of_trust = 0;
  const double trust = half_width + 2.0;
  for (std::size_t q = 0; q < centers.size(); ++q) {
    const PhasePoint& p = rq.preimages[q];
    if (std::max(std::max(std::abs(p.x.x), std::abs(p.x.y)),
                 std::max(std::abs(p.v.x), std::abs(p.v.y))) > trust)
      ++out_of_trust;
    vals[index[q]] = f0.density(p);
  }
  if (report) {
    report->pruned = pruned;
    report->out_of_trust = out_of_trust;
  }
  return GridDensity(half_width, n, std::move(vals));
}

double gamma_norm_growth_bound(double f0_linf, double f0_l1, double f0_gamma,
                               double gamma, double t, int factor) {
  if (gamma <= 2.0)
    throw std::domain_error("growth bound: gamma must exceed 2");
  if (factor != 1 && factor != 2)
    throw std::invalid_argument("growth bound: factor is 1 or 2");
  const double alpha = factor * field_bound_constant() *
                       std::pow(f0_linf, 0.25) * std::pow(f0_l1, 0.75);
  return std::pow(1.0 + alpha * t, 2.0 * gamma) * f0_gamma;
}

}  // namespace gyro

#include "gyro/fields.hpp"

#include <cmath>
#include <stdexcept>

#include "gyro/kernel.hpp"
#include "gyro/util/parallel.hpp"

namespace gyro {

namespace {
constexpr double kTwoPi = 2.0 * M_PI;

inline Vec2 exact_force(Vec2 d1, Vec2 d2) {
  const double r2 = d1.norm2();
  if (r2 < d2.norm2()) return {0.0, 0.0};
  if (r2 < kSingularTol * kSingularTol)
    throw std::domain_error("field sum hit the kernel singularity");
  return perp(d1) / (kTwoPi * r2);
}
}  // namespace

Vec2 KernelContext::force(Vec2 d1, Vec2 d2) const {
  if (!grid_) return exact_force(d1, d2);
  const double r = d1.norm(), s = d2.norm();
  const double tau = (s - r) / eps_;
  if (tau >= 2.0) return {0.0, 0.0};
  if (tau <= -2.0) return perp(d1) / (kTwoPi * r * r);
  if (r < 1e-15) return {0.0, 0.0};
  const double jhat = grid_->scalar(r / eps_, s / eps_) / eps_;
  return perp(d1) * (jhat / r);
}

void KernelContext::pair(Vec2 dx, Vec2 dv, Vec2& ju, Vec2& ja) const {
  if (!grid_) {
    ju = exact_force(dx, dv);
    ja = exact_force(dv, dx);
    return;
  }
  const double r = dx.norm(), s = dv.norm();
  const double tau = (s - r) / eps_;
  // velocity kernel at (dx, dv)
  if (tau >= 2.0) {
    ju = {0.0, 0.0};
  } else if (tau <= -2.0) {
    ju = perp(dx) / (kTwoPi * r * r);
  } else if (r < 1e-15) {
    ju = {0.0, 0.0};
  } else {
    const double jhat = grid_->scalar(r / eps_, s / eps_) / eps_;
    ju = perp(dx) * (jhat / r);
  }
  // acceleration kernel at the swapped separation (dv, dx)
  if (tau <= -2.0) {
    ja = {0.0, 0.0};
  } else if (tau >= 2.0) {
    ja = perp(dv) / (kTwoPi * s * s);
  } else if (s < 1e-15) {
    ja = {0.0, 0.0};
  } else {
    const double jhat = grid_->scalar(s / eps_, r / eps_) / eps_;
    ja = perp(dv) * (jhat / s);
  }
}

FieldPair eval_fields(const ParticleEnsemble& f, PhasePoint z,
                      const KernelContext& kernel, std::ptrdiff_t skip) {
  Vec2 u{0, 0}, a{0, 0};
  const auto& pts = f.points();
  const auto& w = f.weights();
  Vec2 ju, ja;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (static_cast<std::ptrdiff_t>(i) == skip) continue;
    kernel.pair(z.x - pts[i].x, z.v - pts[i].v, ju, ja);
    u += w[i] * ju;
    a += w[i] * ja;
  }
  return {u, a};
}

namespace {

// One quadrature atom of the grid convolution.  Cells close to the query
// are split so the 1/|dx| spike of a lumped cell cannot exceed the field
// of the underlying piecewise-constant density.
void accumulate_cell(const KernelContext& kernel, PhasePoint z, PhasePoint c,
                     double mass, double width, int depth, Vec2& u, Vec2& a) {
  const Vec2 dx = z.x - c.x, dv = z.v - c.v;
  const bool close = std::max(std::abs(dx.x), std::abs(dx.y)) < 2.0 * width &&
                     std::max(std::abs(dv.x), std::abs(dv.y)) < 2.0 * width;
  if (close && depth > 0) {
    const double sub = width / 4.0;
    const double m = mass / 256.0;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k)
          for (int l = 0; l < 4; ++l) {
            const PhasePoint cc{{c.x.x + (i - 1.5) * sub, c.x.y + (j - 1.5) * sub},
                                {c.v.x + (k - 1.5) * sub, c.v.y + (l - 1.5) * sub}};
            accumulate_cell(kernel, z, cc, m, sub, depth - 1, u, a);
          }
    return;
  }
  Vec2 ju, ja;
  kernel.pair(dx, dv, ju, ja);
  u += mass * ju;
  a += mass * ja;
}

}  // namespace

FieldPair eval_fields(const GridDensity& f, PhasePoint z,
                      const KernelContext& kernel) {
  Vec2 u{0, 0}, a{0, 0};
  const double h = f.cell_width();
  // refinement is only needed for the unmollified kernel; the mollified
  // one is bounded on the kernel scale eps
  const int depth = kernel.mollified() && kernel.eps() > h ? 0 : 2;
  for (const auto& atom : f.atoms())
    accumulate_cell(kernel, z, atom.z, atom.mass, h, depth, u, a);
  return {u, a};
}

template <typename Source>
static std::vector<FieldPair> batch_impl(const Source& f,
                                         const std::vector<PhasePoint>& zs,
                                         const KernelContext& kernel,
                                         int threads) {
  std::vector<FieldPair> out(zs.size());
  parallel_for(zs.size(), threads,
               [&](std::size_t i) { out[i] = eval_fields(f, zs[i], kernel); });
  return out;
}

std::vector<FieldPair> eval_fields_batch(const ParticleEnsemble& f,
                                         const std::vector<PhasePoint>& zs,
                                         const KernelContext& kernel,
                                         int threads) {
  return batch_impl(f, zs, kernel, threads);
}

std::vector<FieldPair> eval_fields_batch(const GridDensity& f,
                                         const std::vector<PhasePoint>& zs,
                                         const KernelContext& kernel,
                                         int threads) {
  return batch_impl(f, zs, kernel, threads);
}

double field_bound_constant() {
  return std::pow(2.0, 1.25) / (3.0 * std::sqrt(M_PI));
}

double field_sup_bound(double l1, double linf) {
  if (!(l1 > 0.0) || !(linf > 0.0))
    throw std::domain_error("field_sup_bound: norms must be positive");
  return field_bound_constant() * std::pow(linf, 0.25) * std::pow(l1, 0.75);
}

double field_lip_bound(double gamma_norm, double gamma) {
  if (gamma_norm < 0.0)
    throw std::domain_error("field_lip_bound: negative norm");
  return 3.0 * kappa(gamma) * gamma_norm;
}

}  // namespace gyro

#include "gyro/mollifier.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gyro/util/parallel.hpp"
#include "gyro/util/quadrature.hpp"
#include "gyro/util/rng.hpp"

namespace gyro {

namespace {
constexpr double kTwoPi = 2.0 * M_PI;

double bump_unnormalized(double r) {
  const double s = 1.0 - r * r;
  if (s <= 1e-14) return 0.0;
  return std::exp(-1.0 / s);
}
}  // namespace

// ---------------------------------------------------------------------------
// BumpProfile

BumpProfile::BumpProfile() {
  const auto& gl = GaussLegendre::get(200);
  const double mass_r =
      gl.integrate(0.0, 1.0, [](double r) { return bump_unnormalized(r) * r; });
  c_ = 1.0 / (kTwoPi * mass_r);
  chi_max_ = c_ * bump_unnormalized(0.0);
  mean_radius_ =
      kTwoPi * c_ *
      gl.integrate(0.0, 1.0, [](double r) { return bump_unnormalized(r) * r * r; });

  // sup of |grad chi| = C sup_r 2r/(1-r^2)^2 exp(-1/(1-r^2)); coarse scan
  // plus golden-section refinement.
  auto gp = [](double r) {
    const double s = 1.0 - r * r;
    if (s <= 1e-14 || r <= 0.0) return 0.0;
    return 2.0 * r / (s * s) * std::exp(-1.0 / s);
  };
  double best_r = 0.5;
  for (int i = 1; i < 4000; ++i) {
    const double r = i / 4000.0;
    if (gp(r) > gp(best_r)) best_r = r;
  }
  double lo = best_r - 1e-3, hi = best_r + 1e-3;
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 120; ++it) {
    const double m1 = hi - phi * (hi - lo), m2 = lo + phi * (hi - lo);
    if (gp(m1) < gp(m2))
      lo = m1;
    else
      hi = m2;
  }
  grad_max_ = c_ * gp(0.5 * (lo + hi));

  // radial mass cdf on a uniform grid, accumulated panel by panel
  const int panels = 4096;
  cdf_.resize(panels + 1);
  cdf_[0] = 0.0;
  const auto& gp32 = GaussLegendre::get(32);
  for (int i = 1; i <= panels; ++i) {
    const double r0 = (i - 1) / double(panels), r1 = i / double(panels);
    cdf_[i] = cdf_[i - 1] +
              kTwoPi * c_ *
                  gp32.integrate(r0, r1, [this](double r) {
                    return bump_unnormalized(r) * r;
                  });
  }
}

double BumpProfile::radial(double r) const { return c_ * bump_unnormalized(r); }

double BumpProfile::radial_mass(double R) const {
  if (R <= 0.0) return 0.0;
  if (R >= 1.0) return cdf_.back();
  const int panels = static_cast<int>(cdf_.size()) - 1;
  const double u = R * panels;
  const int i = std::min(static_cast<int>(u), panels - 1);
  const double h = 1.0 / panels;
  const double t = u - i;
  // cubic Hermite with the analytic slope 2 pi chi0(r) r
  const double r0 = i * h, r1 = (i + 1) * h;
  const double m0 = kTwoPi * radial(r0) * r0 * h;
  const double m1 = kTwoPi * radial(r1) * r1 * h;
  const double p0 = cdf_[i], p1 = cdf_[i + 1];
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * p0 + (t3 - 2 * t2 + t) * m0 +
         (-2 * t3 + 3 * t2) * p1 + (t3 - t2) * m1;
}

double BumpProfile::radial_mass_inverse(double u) const {
  u = std::clamp(u, 0.0, 1.0);
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (radial_mass(mid) < u)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double BumpProfile::disc_mass(double a, double b) const {
  if (b <= 0.0) return 0.0;
  const double tau = b - a;
  if (tau >= 1.0) return 1.0;
  if (tau <= -1.0) return 0.0;
  if (a < 1e-12) return radial_mass(std::min(1.0, b));

  // arc weight 2 acos(qhat), qhat = (rho^2 - tau (2a + tau)) / (2 a rho);
  // fully inside for rho < tau (when tau > 0), empty beyond rho = a + b.
  const double rho1 = std::abs(tau);
  const double rho2 = std::min(1.0, 2.0 * a + tau);
  double m = (tau > 0.0) ? radial_mass(std::min(1.0, tau)) : 0.0;
  if (rho2 > rho1) {
    // sin^2 substitution absorbs the sqrt behaviour of acos at both ends
    const auto& gl = GaussLegendre::get(64);
    m += gl.integrate(0.0, 1.0, [&](double t) {
      const double s = std::sin(0.5 * M_PI * t);
      const double rho = rho1 + (rho2 - rho1) * s * s;
      const double drho = (rho2 - rho1) * 0.5 * M_PI * std::sin(M_PI * t);
      if (rho <= 0.0) return 0.0;
      const double qhat =
          std::clamp((rho * rho - tau * (2.0 * a + tau)) / (2.0 * a * rho),
                     -1.0, 1.0);
      return radial(rho) * rho * 2.0 * std::acos(qhat) * drho;
    });
  }
  return m;
}

const RingMassGrid& BumpProfile::ring_grid() const {
  std::call_once(ring_once_,
                 [this] { ring_ = std::make_unique<RingMassGrid>(*this); });
  return *ring_;
}

const ForceKernelGrid& BumpProfile::kernel_grid() const {
  std::call_once(kernel_once_, [this] {
    kernel_ = std::make_unique<ForceKernelGrid>(*this);
  });
  return *kernel_;
}

std::shared_ptr<const BumpProfile> BumpProfile::standard() {
  static std::shared_ptr<const BumpProfile> inst =
      std::make_shared<const BumpProfile>();
  return inst;
}

// ---------------------------------------------------------------------------
// RingMassGrid

RingMassGrid::RingMassGrid(const BumpProfile& profile, int n_xi, int n_tau)
    : nxi_(n_xi), ntau_(n_tau), table_(std::size_t(n_xi) * n_tau) {
  parallel_for(n_xi, 0, [&](std::size_t i) {
    const double xi = double(i) / (n_xi - 1);
    const double a = xi > 0.0 ? 1.0 / xi - 1.0 : 1e8;
    for (int j = 0; j < n_tau; ++j) {
      const double tau = -1.0 + 2.0 * double(j) / (n_tau - 1);
      table_[i * std::size_t(n_tau) + j] =
          profile.disc_mass(a, std::max(0.0, a + tau));
    }
  });
}

double RingMassGrid::mass(double a, double b) const {
  const double tau = b - a;
  if (tau <= -1.0) return 0.0;
  if (tau >= 1.0) return 1.0;
  if (b <= 0.0) return 0.0;
  const double xi = 1.0 / (1.0 + std::max(0.0, a));
  const double u = xi * (nxi_ - 1);
  const double v = 0.5 * (tau + 1.0) * (ntau_ - 1);
  const int i = std::clamp(int(u), 0, nxi_ - 2);
  const int j = std::clamp(int(v), 0, ntau_ - 2);
  const double fu = u - i, fv = v - j;
  const auto at = [&](int r, int c) {
    return table_[r * std::size_t(ntau_) + c];
  };
  return (1 - fu) * ((1 - fv) * at(i, j) + fv * at(i, j + 1)) +
         fu * ((1 - fv) * at(i + 1, j) + fv * at(i + 1, j + 1));
}

// ---------------------------------------------------------------------------
// ForceKernelGrid

namespace {

/// chi(x - y) with x = a e1 and y = rho e_theta, computed through
/// (a - rho) + 2 rho sin^2(theta/2) so that huge a stays accurate.
double chi_displaced(const BumpProfile& p, double a, double rho,
                     double theta) {
  const double sh = std::sin(0.5 * theta);
  const double u1 = (a - rho) + 2.0 * rho * sh * sh;
  const double u2 = rho * std::sin(theta);
  return p.value({u1, u2});
}

}  // namespace

ForceKernelGrid::ForceKernelGrid(const BumpProfile& profile, int n_xi,
                                 int n_tau_inner)
    : nxi_(n_xi), ntau_(n_tau_inner + 4) {
  dtau_ = 4.0 / (n_tau_inner - 1);
  tau0_ = -2.0 - 2.0 * dtau_;
  table_.resize(std::size_t(nxi_) * ntau_);
  const RingMassGrid& ring = profile.ring_grid();
  const auto& gl_rho = GaussLegendre::get(48);
  const auto& gl_th = GaussLegendre::get(96);

  parallel_for(nxi_, 0, [&](std::size_t i) {
    const double xi = double(i) / (nxi_ - 1);
    const double a = xi > 0.0 ? 1.0 / xi - 1.0 : 1e8;
    const double rho_lo = std::max(0.0, a - 1.0), rho_hi = a + 1.0;
    const double half_th = a > 1.0 ? std::asin(1.0 / a) : M_PI;

    // angular factor F(rho) = int chi(x - rho e_theta) cos(theta) dtheta
    // is shared by the whole row
    const int nr = static_cast<int>(gl_rho.nodes.size());
    std::vector<double> rho(nr), fr(nr);
    for (int k = 0; k < nr; ++k) {
      rho[k] = 0.5 * (rho_lo + rho_hi) + 0.5 * (rho_hi - rho_lo) * gl_rho.nodes[k];
      double acc = 0.0;
      for (std::size_t q = 0; q < gl_th.nodes.size(); ++q) {
        const double th = half_th * gl_th.nodes[q];
        acc += gl_th.weights[q] * half_th *
               chi_displaced(profile, a, rho[k], th) * std::cos(th);
      }
      fr[k] = acc * 0.5 * (rho_hi - rho_lo);
    }

    for (int j = 0; j < ntau_; ++j) {
      const double tau = tau0_ + j * dtau_;
      double val;
      if (tau <= -2.0) {
        val = a > 0.0 ? (1.0 + a) / (kTwoPi * a) : 0.0;
      } else if (tau >= 2.0) {
        val = 0.0;
      } else {
        const double b = std::abs(a + tau);  // even extension through b = 0
        double acc = 0.0;
        for (int k = 0; k < nr; ++k)
          acc += gl_rho.weights[k] * fr[k] * ring.mass(b, rho[k]);
        val = (1.0 + a) * acc / kTwoPi;
      }
      table_[i * std::size_t(ntau_) + j] = val;
    }
  });
}

namespace {
inline void catmull_rom(double t, double w[4]) {
  const double t2 = t * t, t3 = t2 * t;
  w[0] = 0.5 * (-t3 + 2 * t2 - t);
  w[1] = 0.5 * (3 * t3 - 5 * t2 + 2);
  w[2] = 0.5 * (-3 * t3 + 4 * t2 + t);
  w[3] = 0.5 * (t3 - t2);
}
}  // namespace

double ForceKernelGrid::row_interp(int i, int j, double ftau) const {
  // cubic in tau along row i, stencil j-1 .. j+2 (ghost columns exist)
  double w[4];
  catmull_rom(ftau, w);
  const double* row = &table_[std::size_t(i) * ntau_];
  return w[0] * row[j - 1] + w[1] * row[j] + w[2] * row[j + 1] +
         w[3] * row[j + 2];
}

double ForceKernelGrid::scalar(double a, double b) const {
  const double tau = b - a;
  if (tau >= 2.0) return 0.0;
  if (tau <= -2.0) return a > 0.0 ? 1.0 / (kTwoPi * a) : 0.0;
  const double xi = 1.0 / (1.0 + std::max(0.0, a));

  const double u = xi * (nxi_ - 1);
  int i = std::clamp(int(std::floor(u)), 0, nxi_ - 2);
  const double fu = u - i;
  const double vt = (tau - tau0_) / dtau_;
  int j = std::clamp(int(std::floor(vt)), 1, ntau_ - 3);
  const double ft = vt - j;

  double rows[4];
  for (int k = 0; k < 4; ++k) {
    const int ri = i - 1 + k;
    if (ri < 0)
      rows[k] = 2.0 * row_interp(0, j, ft) - row_interp(1, j, ft);
    else if (ri > nxi_ - 1)
      rows[k] = 2.0 * row_interp(nxi_ - 1, j, ft) - row_interp(nxi_ - 2, j, ft);
    else
      rows[k] = row_interp(ri, j, ft);
  }
  double w[4];
  catmull_rom(fu, w);
  const double s = w[0] * rows[0] + w[1] * rows[1] + w[2] * rows[2] +
                   w[3] * rows[3];
  return s * xi;  // jhat = S / (1 + a)
}

// ---------------------------------------------------------------------------
// MollifierSpec

MollifierSpec::MollifierSpec(double eps, int quad_order,
                             std::shared_ptr<const BumpProfile> profile)
    : eps_(eps), order_(quad_order), profile_(std::move(profile)) {
  if (!(eps_ > 0.0)) throw std::invalid_argument("mollifier: eps must be > 0");
  if (order_ < 4) throw std::invalid_argument("mollifier: order too small");
  if (!profile_) throw std::invalid_argument("mollifier: null profile");
}

double MollifierSpec::density(PhasePoint z) const {
  const double e2 = eps_ * eps_;
  return profile_->radial(z.x.norm() / eps_) *
         profile_->radial(z.v.norm() / eps_) / (e2 * e2);
}

double MollifierSpec::ring_mass(double vnorm, double r) const {
  return profile_->ring_grid().mass(vnorm / eps_, r / eps_);
}

Vec2 MollifierSpec::mollified_force(PhasePoint z) const {
  const double r = z.x.norm();
  const double s = z.v.norm();
  const double rho_lo = std::max(0.0, r - eps_), rho_hi = r + eps_;
  const double half_th = r > eps_ ? std::asin(eps_ / r) : M_PI;
  const auto& gl_rho = GaussLegendre::get(order_);
  const auto& gl_th = GaussLegendre::get(2 * order_);
  const RingMassGrid& ring = profile_->ring_grid();
  const double inv_e2 = 1.0 / (eps_ * eps_);

  // local frame with x along e1; the polar Jacobian around the origin
  // cancels the kernel singularity exactly
  double acc1 = 0.0, acc2 = 0.0;
  for (std::size_t k = 0; k < gl_rho.nodes.size(); ++k) {
    const double rho =
        0.5 * (rho_lo + rho_hi) + 0.5 * (rho_hi - rho_lo) * gl_rho.nodes[k];
    const double wr = gl_rho.weights[k] * 0.5 * (rho_hi - rho_lo);
    const double mring = ring.mass(s / eps_, rho / eps_);
    if (mring == 0.0) continue;
    for (std::size_t q = 0; q < gl_th.nodes.size(); ++q) {
      const double th = half_th * gl_th.nodes[q];
      const double wt = gl_th.weights[q] * half_th;
      const double sh = std::sin(0.5 * th);
      const Vec2 u{(r - rho) + 2.0 * rho * sh * sh, rho * std::sin(th)};
      const double chi = profile_->value(u / eps_) * inv_e2;
      const double w = wr * wt * chi * mring;
      acc1 += w * std::sin(th);
      acc2 -= w * std::cos(th);
    }
  }
  acc1 /= kTwoPi;
  acc2 /= kTwoPi;
  if (r < 1e-300) return {acc1, acc2};  // zero by symmetry
  const Vec2 xhat = z.x / r;
  // rotate the frame result back: R(a, b) = a xhat - b perp(xhat)
  return acc1 * xhat - acc2 * perp(xhat);
}

Vec2 MollifierSpec::mollified_force_fast(Vec2 dx, Vec2 dv) const {
  const double r = dx.norm();
  const double s = dv.norm();
  const double tau = (s - r) / eps_;
  if (tau >= 2.0) return {0.0, 0.0};
  if (tau <= -2.0) return perp(dx) / (kTwoPi * r * r);
  if (r < 1e-15) return {0.0, 0.0};
  const double jhat =
      profile_->kernel_grid().scalar(r / eps_, s / eps_) / eps_;
  return perp(dx) * (jhat / r);
}

double MollifierSpec::force_sup_bound() const {
  return M_PI * profile_->max_value() / eps_;
}

double MollifierSpec::force_gradient_bound() const {
  return M_PI * profile_->max_gradient() / (eps_ * eps_);
}

// ---------------------------------------------------------------------------
// RingMassTable

RingMassTable::RingMassTable(double eps,
                             std::shared_ptr<const BumpProfile> profile)
    : eps_(eps), profile_(std::move(profile)) {
  if (!(eps_ > 0.0)) throw std::invalid_argument("ring table: eps must be > 0");
}

double RingMassTable::mass(double vnorm, double r) const {
  return profile_->ring_grid().mass(vnorm / eps_, r / eps_);
}

// ---------------------------------------------------------------------------

ParticleEnsemble jitter_ensemble(const ParticleEnsemble& f,
                                 const MollifierSpec& spec,
                                 std::uint64_t seed) {
  Rng rng(seed);
  const BumpProfile& p = spec.profile();
  const double eps = spec.epsilon();
  std::vector<PhasePoint> pts(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double rx = p.radial_mass_inverse(rng.uniform());
    const Vec2 dx = eps * rx * rng.uniform_direction();
    const double rv = p.radial_mass_inverse(rng.uniform());
    const Vec2 dv = eps * rv * rng.uniform_direction();
    pts[i] = {f.point(i).x + dx, f.point(i).v + dv};
  }
  return ParticleEnsemble(std::move(pts), f.weights());
}

}  // namespace gyro

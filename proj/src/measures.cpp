#include "gyro/measures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "gyro/util/quadrature.hpp"
#include "gyro/util/rng.hpp"

namespace gyro {

double kappa(double gamma) {
  if (gamma <= 2.0)
    throw std::domain_error("kappa: integral diverges for gamma <= 2");
  return 2.0 * M_PI / ((gamma - 1.0) * (gamma - 2.0));
}

GammaNorm::GammaNorm(double g, double v) : gamma(g), value(v) {
  if (g <= 2.0) throw std::domain_error("GammaNorm: gamma must exceed 2");
}

// ---------------------------------------------------------------------------
// ParticleEnsemble

ParticleEnsemble::ParticleEnsemble(std::vector<PhasePoint> points,
                                   std::vector<double> weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
  if (points_.size() != weights_.size())
    throw std::invalid_argument("ensemble: points/weights size mismatch");
  if (points_.empty()) throw std::invalid_argument("ensemble: empty");
  double total = 0.0;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!points_[i].finite())
      throw std::invalid_argument("ensemble: non-finite point");
    if (!(weights_[i] > 0.0))
      throw std::invalid_argument("ensemble: weights must be positive");
    total += weights_[i];
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("ensemble: weights must sum to 1");
}

ParticleEnsemble ParticleEnsemble::equal_weights(
    std::vector<PhasePoint> points) {
  const std::size_t n = points.size();
  // Make the weights sum to 1 exactly in floating point.
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  double total = 0.0;
  for (double wi : w) total += wi;
  w.back() += 1.0 - total;
  return ParticleEnsemble(std::move(points), std::move(w));
}

bool ParticleEnsemble::uniform_weights() const {
  const double ref = 1.0 / static_cast<double>(size());
  for (double w : weights_)
    if (std::abs(w - ref) > 1e-12) return false;
  return true;
}

double ParticleEnsemble::first_moment() const {
  double m = 0.0;
  for (std::size_t i = 0; i < size(); ++i)
    m += weights_[i] * (points_[i].x.norm() + points_[i].v.norm());
  return m;
}

ParticleEnsemble ParticleEnsemble::swapped_xv() const {
  std::vector<PhasePoint> pts(points_.size());
  for (std::size_t i = 0; i < points_.size(); ++i)
    pts[i] = points_[i].swapped();
  return ParticleEnsemble(std::move(pts), weights_);
}

ParticleEnsemble ParticleEnsemble::shifted(Vec2 dx, Vec2 dv) const {
  std::vector<PhasePoint> pts(points_.size());
  for (std::size_t i = 0; i < points_.size(); ++i)
    pts[i] = {points_[i].x + dx, points_[i].v + dv};
  return ParticleEnsemble(std::move(pts), weights_);
}

// ---------------------------------------------------------------------------
// Snapshot IO

void save_snapshot(const ParticleEnsemble& f, const std::string& path,
                   SnapshotMeta meta) {
  std::FILE* out = std::fopen(path.c_str(), "w");
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  std::fprintf(out, "# gyro-ensemble v1 N=%zu time=%.17g eps=%.17g\n",
               f.size(), meta.time, meta.eps);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const PhasePoint& z = f.point(i);
    std::fprintf(out, "%.17g %.17g %.17g %.17g %.17g\n", f.weight(i), z.x.x,
                 z.x.y, z.v.x, z.v.y);
  }
  std::fclose(out);
}

std::pair<ParticleEnsemble, SnapshotMeta> load_snapshot(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open snapshot: " + path);
  std::string header;
  std::getline(in, header);
  std::size_t n = 0;
  SnapshotMeta meta;
  if (std::sscanf(header.c_str(), "# gyro-ensemble v1 N=%zu time=%lg eps=%lg",
                  &n, &meta.time, &meta.eps) != 3)
    throw std::runtime_error("bad snapshot header in " + path);
  std::vector<PhasePoint> pts(n);
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(in >> w[i] >> pts[i].x.x >> pts[i].x.y >> pts[i].v.x >> pts[i].v.y))
      throw std::runtime_error("truncated snapshot: " + path);
  }
  return {ParticleEnsemble(std::move(pts), std::move(w)), meta};
}

// ---------------------------------------------------------------------------
// GridDensity

GridDensity::GridDensity(double half_width, int cells_per_axis,
                         std::vector<double> values)
    : half_width_(half_width), n_(cells_per_axis), values_(std::move(values)) {
  if (half_width_ <= 0.0 || n_ < 2)
    throw std::invalid_argument("grid: bad geometry");
  const std::size_t expect = static_cast<std::size_t>(n_) * n_ * n_ * n_;
  if (values_.size() != expect)
    throw std::invalid_argument("grid: value count mismatch");
  double m = 0.0;
  for (double v : values_) {
    if (v < 0.0 || !std::isfinite(v))
      throw std::invalid_argument("grid: values must be finite and >= 0");
    m += v;
  }
  mass_ = m * cell_volume();
  if (!(mass_ > 0.0)) throw std::invalid_argument("grid: zero total mass");
}

double GridDensity::cell_volume() const {
  const double h = cell_width();
  return h * h * h * h;
}

PhasePoint GridDensity::center(std::size_t flat) const {
  const std::size_t n = static_cast<std::size_t>(n_);
  const int l = static_cast<int>(flat % n);
  const int k = static_cast<int>((flat / n) % n);
  const int j = static_cast<int>((flat / (n * n)) % n);
  const int i = static_cast<int>(flat / (n * n * n));
  return {{axis_center(i), axis_center(j)}, {axis_center(k), axis_center(l)}};
}

GridDensity GridDensity::from_function(
    const std::function<double(PhasePoint)>& f, double half_width,
    int cells_per_axis, int supersample) {
  const int n = cells_per_axis;
  const int ss = std::max(1, supersample);
  const double h = 2.0 * half_width / n;
  std::vector<double> vals(static_cast<std::size_t>(n) * n * n * n);
  std::vector<double> axis(n);
  for (int i = 0; i < n; ++i) axis[i] = -half_width + (i + 0.5) * h;
  std::vector<double> sub(ss);
  for (int q = 0; q < ss; ++q) sub[q] = ((q + 0.5) / ss - 0.5) * h;
  std::size_t flat = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l, ++flat) {
          double acc = 0.0;
          for (int qa = 0; qa < ss; ++qa)
            for (int qb = 0; qb < ss; ++qb)
              for (int qc = 0; qc < ss; ++qc)
                for (int qd = 0; qd < ss; ++qd)
                  acc += f({{axis[i] + sub[qa], axis[j] + sub[qb]},
                            {axis[k] + sub[qc], axis[l] + sub[qd]}});
          vals[flat] = acc / (static_cast<double>(ss) * ss * ss * ss);
        }
  return GridDensity(half_width, n, std::move(vals));
}

double GridDensity::lp_norm(double p) const {
  if (std::isinf(p)) return *std::max_element(values_.begin(), values_.end());
  if (p < 1.0) throw std::domain_error("lp_norm: p must be >= 1");
  double acc = 0.0;
  for (double v : values_) acc += std::pow(v, p);
  return std::pow(acc * cell_volume(), 1.0 / p);
}

GammaNorm GridDensity::gamma_norm(double gamma) const {
  if (gamma <= 2.0) throw std::domain_error("gamma_norm: gamma must exceed 2");
  double best = 0.0;
  for (std::size_t flat = 0; flat < values_.size(); ++flat) {
    if (values_[flat] == 0.0) continue;
    const PhasePoint c = center(flat);
    const double w = std::pow((1.0 + c.x.norm()) * (1.0 + c.v.norm()), gamma);
    best = std::max(best, w * values_[flat]);
  }
  return GammaNorm(gamma, best);
}

const std::vector<GridDensity::Atom>& GridDensity::atoms() const {
  if (atoms_.empty()) {
    const double vol = cell_volume();
    for (std::size_t flat = 0; flat < values_.size(); ++flat)
      if (values_[flat] > 0.0) atoms_.push_back({center(flat), values_[flat] * vol});
  }
  return atoms_;
}

// ---------------------------------------------------------------------------
// InitialCondition

namespace {

// C^inf step: 0 at s <= 0, 1 at s >= 1.
double smooth_step(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / s);
  const double b = std::exp(-1.0 / (1.0 - s));
  return a / (a + b);
}

// Flat-top radial profile: 1 on [0, r0], smooth decay to 0 at r1.
double plateau(double r, double r0, double r1) {
  if (r <= r0) return 1.0;
  if (r >= r1) return 0.0;
  return smooth_step((r1 - r) / (r1 - r0));
}

double trunc_gauss_2d(Vec2 u, double sigma, double radius) {
  const double r2 = u.norm2();
  if (r2 > radius * radius) return 0.0;
  const double norm =
      2.0 * M_PI * sigma * sigma *
      (1.0 - std::exp(-radius * radius / (2.0 * sigma * sigma)));
  return std::exp(-r2 / (2.0 * sigma * sigma)) / norm;
}

// Samples |u| for the 2D radial density proportional to (1+r)^{-a}:
// propose u = (1+r) from a Pareto(a-2) tail, accept with probability 1-1/u.
double sample_poly_radius(Rng& rng, double a) {
  for (;;) {
    double t = rng.uniform();
    while (t <= 0.0) t = rng.uniform();
    const double u = std::pow(t, -1.0 / (a - 2.0));
    if (rng.uniform() < 1.0 - 1.0 / u) return u - 1.0;
  }
}

}  // namespace

InitialCondition InitialCondition::gaussian(double sigma, double trunc) {
  InitialCondition ic;
  ic.kind_ = Kind::gaussian;
  ic.sigma_ = sigma;
  ic.trunc_radius_ = trunc * sigma;
  return ic;
}

InitialCondition InitialCondition::polynomial(double a) {
  if (a <= 2.0)
    throw std::domain_error("polynomial profile needs a > 2 to be integrable");
  InitialCondition ic;
  ic.kind_ = Kind::polynomial;
  ic.a_ = a;
  return ic;
}

InitialCondition InitialCondition::uniform_box(double half) {
  InitialCondition ic;
  ic.kind_ = Kind::uniform_box;
  ic.box_half_ = half;
  return ic;
}

InitialCondition InitialCondition::two_bump(double offset, double r0,
                                            double r1) {
  InitialCondition ic;
  ic.kind_ = Kind::two_bump;
  ic.offset_ = offset;
  ic.r0_ = r0;
  ic.r1_ = r1;
  return ic;
}

InitialCondition InitialCondition::parse(const std::string& name) {
  if (name == "gaussian") return gaussian();
  if (name == "polynomial") return polynomial();
  if (name == "uniform_box") return uniform_box();
  if (name == "two_bump") return two_bump();
  throw std::invalid_argument("unknown initial condition: " + name);
}

double InitialCondition::plateau_mass_2d() const {
  // 2 pi int r p(r) dr, cached via static would race; cheap enough inline.
  const auto& gl = GaussLegendre::get(64);
  return 2.0 * M_PI *
         gl.integrate(0.0, r1_, [&](double r) {
           return r * plateau(r, r0_, r1_);
         });
}

double InitialCondition::density(PhasePoint z) const {
  const Vec2 x = z.x - shift_x_;
  const Vec2 v = z.v - shift_v_;
  switch (kind_) {
    case Kind::gaussian:
      return trunc_gauss_2d(x, sigma_, trunc_radius_) *
             trunc_gauss_2d(v, sigma_, trunc_radius_);
    case Kind::polynomial: {
      const double z1 = kappa(a_);
      return std::pow(1.0 + x.norm(), -a_) * std::pow(1.0 + v.norm(), -a_) /
             (z1 * z1);
    }
    case Kind::uniform_box: {
      const double b = box_half_;
      if (std::abs(x.x) > b || std::abs(x.y) > b || std::abs(v.x) > b ||
          std::abs(v.y) > b)
        return 0.0;
      const double side = 2.0 * b;
      return 1.0 / (side * side * side * side);
    }
    case Kind::two_bump: {
      const double m = plateau_mass_2d();
      const double px = 0.5 * (plateau((x - Vec2{offset_, 0}).norm(), r0_, r1_) +
                               plateau((x + Vec2{offset_, 0}).norm(), r0_, r1_));
      const double pv = plateau(v.norm(), r0_, r1_);
      return px * pv / (m * m);
    }
  }
  return 0.0;
}

ParticleEnsemble InitialCondition::sample(std::size_t n,
                                          std::uint64_t seed) const {
  Rng rng(seed);
  std::vector<PhasePoint> pts(n);
  auto sample_plateau = [&]() {
    // rejection against the uniform disc of radius r1
    for (;;) {
      const Vec2 u = rng.uniform_disc(r1_);
      if (rng.uniform() <= plateau(u.norm(), r0_, r1_)) return u;
    }
  };
  for (std::size_t i = 0; i < n; ++i) {
    PhasePoint z;
    switch (kind_) {
      case Kind::gaussian:
        z.x = rng.gauss2_truncated(sigma_, trunc_radius_);
        z.v = rng.gauss2_truncated(sigma_, trunc_radius_);
        break;
      case Kind::polynomial:
        z.x = sample_poly_radius(rng, a_) * rng.uniform_direction();
        z.v = sample_poly_radius(rng, a_) * rng.uniform_direction();
        break;
      case Kind::uniform_box:
        z.x = {rng.uniform(-box_half_, box_half_),
               rng.uniform(-box_half_, box_half_)};
        z.v = {rng.uniform(-box_half_, box_half_),
               rng.uniform(-box_half_, box_half_)};
        break;
      case Kind::two_bump: {
        const double side = rng.uniform() < 0.5 ? -1.0 : 1.0;
        z.x = sample_plateau() + Vec2{side * offset_, 0.0};
        z.v = sample_plateau();
        break;
      }
    }
    pts[i] = {z.x + shift_x_, z.v + shift_v_};
  }
  return ParticleEnsemble::equal_weights(std::move(pts));
}

double InitialCondition::linf() const {
  switch (kind_) {
    case Kind::gaussian: {
      const double g0 = trunc_gauss_2d({0, 0}, sigma_, trunc_radius_);
      return g0 * g0;
    }
    case Kind::polynomial: {
      const double z1 = kappa(a_);
      return 1.0 / (z1 * z1);
    }
    case Kind::uniform_box: {
      const double side = 2.0 * box_half_;
      return 1.0 / (side * side * side * side);
    }
    case Kind::two_bump: {
      const double m = plateau_mass_2d();
      // bumps are disjoint for offset > r1
      const double px = offset_ >= r1_ ? 0.5 : 1.0;
      return px / (m * m);
    }
  }
  return 0.0;
}

bool InitialCondition::compact_support() const {
  return kind_ != Kind::polynomial;
}

double InitialCondition::support_distance(PhasePoint z) const {
  if (!compact_support()) return 0.0;
  const Vec2 x = z.x - shift_x_;
  const Vec2 v = z.v - shift_v_;
  double dx = 0.0, dv = 0.0;
  switch (kind_) {
    case Kind::gaussian:
      dx = std::max(0.0, x.norm() - trunc_radius_);
      dv = std::max(0.0, v.norm() - trunc_radius_);
      break;
    case Kind::uniform_box: {
      auto axis = [&](double c) { return std::max(0.0, std::abs(c) - box_half_); };
      const double ax = std::hypot(axis(x.x), axis(x.y));
      const double av = std::hypot(axis(v.x), axis(v.y));
      dx = ax;
      dv = av;
      break;
    }
    case Kind::two_bump: {
      const double d1 = (x - Vec2{offset_, 0}).norm();
      const double d2 = (x + Vec2{offset_, 0}).norm();
      dx = std::max(0.0, std::min(d1, d2) - r1_);
      dv = std::max(0.0, v.norm() - r1_);
      break;
    }
    case Kind::polynomial:
      break;
  }
  return std::hypot(dx, dv);
}

InitialCondition InitialCondition::shifted(Vec2 dx, Vec2 dv) const {
  InitialCondition ic = *this;
  ic.shift_x_ = shift_x_ + dx;
  ic.shift_v_ = shift_v_ + dv;
  return ic;
}

}  // namespace gyro

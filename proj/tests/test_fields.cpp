#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <optional>

#include "gyro/fields.hpp"
#include "gyro/util/quadrature.hpp"
#include "gyro/util/rng.hpp"

using namespace gyro;

TEST_CASE("single source examples") {
  const auto f = ParticleEnsemble::equal_weights({{{0, 0}, {0, 0}}});
  const KernelContext exact;
  const auto [u, a] = eval_fields(f, {{1, 0}, {0, 0}}, exact);
  CHECK(u.x == doctest::Approx(0.0));
  CHECK(u.y == doctest::Approx(-1.0 / (2.0 * M_PI)).epsilon(1e-15));
  // the swapped kernel sees a zero first block inside the screened region
  CHECK(a.x == 0.0);
  CHECK(a.y == 0.0);

  // querying a source point with the exact kernel is singular
  CHECK_THROWS_AS(eval_fields(f, {{0, 0}, {0, 0}}, exact), std::domain_error);
  // unless the source is skipped
  const auto [u2, a2] = eval_fields(f, {{0, 0}, {0, 0}}, exact, 0);
  CHECK(u2.norm() == 0.0);
  CHECK(a2.norm() == 0.0);
}

TEST_CASE("radially symmetric grid: fields vanish at the center") {
  auto radial = [](PhasePoint z) {
    return std::exp(-z.x.norm2() - z.v.norm2());
  };
  const auto g = GridDensity::from_function(radial, 2.0, 10);
  const KernelContext exact;
  const auto [u, a] = eval_fields(g, {{0, 0}, {0, 0}}, exact);
  CHECK(u.norm() <= 1e-13);
  CHECK(a.norm() <= 1e-13);
}

TEST_CASE("uniform product-disc source against the quadrature oracle") {
  // density 1/pi^2 on B(0,1) x B(0,1), query far outside in x
  auto disc2 = [](PhasePoint z) {
    return (z.x.norm() <= 1.0 && z.v.norm() <= 1.0) ? 1.0 / (M_PI * M_PI)
                                                    : 0.0;
  };
  const PhasePoint query{{2, 0}, {0, 0}};

  // oracle: factorized polar quadrature of the convolution; every radius
  // from the query to the x-disc exceeds the whole v-disc, so the
  // screening factor is identically one
  const auto& gl = GaussLegendre::get(64);
  Vec2 oracle{0, 0};
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
    const double r = 0.5 + 0.5 * gl.nodes[i];
    const double wr = 0.5 * gl.weights[i];
    for (std::size_t j = 0; j < gl.nodes.size(); ++j) {
      const double th = M_PI * gl.nodes[j];
      const double wt = M_PI * gl.weights[j];
      const Vec2 y{r * std::cos(th), r * std::sin(th)};
      const Vec2 d = query.x - y;
      oracle += (wr * wt * r / (M_PI)) * perp(d) / (2.0 * M_PI * d.norm2());
    }
  }
  CHECK(oracle.y == doctest::Approx(-1.0 / (4.0 * M_PI)).epsilon(1e-10));

  const auto g = GridDensity::from_function(disc2, 1.25, 40, 3);
  const KernelContext exact;
  const auto [u, a] = eval_fields(g, query, exact);
  CHECK(std::abs(u.x - oracle.x) <= 1e-4);
  CHECK(std::abs(u.y - oracle.y) <= 1e-4);
  CHECK(a.norm() <= 1e-12);
}

TEST_CASE("sup bound constant and scaling") {
  const double c = field_bound_constant();
  CHECK(c == doctest::Approx(std::pow(2.0, 1.25) / (3.0 * std::sqrt(M_PI)))
                 .epsilon(1e-15));
  CHECK(c == doctest::Approx(0.44729217797694261).epsilon(1e-12));
  CHECK(field_sup_bound(1.0, 1.0) == doctest::Approx(c));
  CHECK(field_sup_bound(1.0, 16.0) == doctest::Approx(2.0 * c).epsilon(1e-12));
  CHECK_THROWS_AS(field_sup_bound(0.0, 1.0), std::domain_error);
}

TEST_CASE("lipschitz bound values") {
  CHECK(field_lip_bound(1.0, 3.0) == doctest::Approx(3.0 * M_PI).epsilon(1e-14));
  CHECK(field_lip_bound(0.0, 3.0) == 0.0);
  CHECK_THROWS_AS(field_lip_bound(1.0, 2.0), std::domain_error);
}

TEST_CASE("sampled sup bound on a catalog density, with and without scale") {
  const auto ic = InitialCondition::polynomial(4.0);
  const auto g = GridDensity::from_function(
      [&](PhasePoint z) { return ic.density(z); }, 4.0, 10, 1);
  const double bound =
      field_sup_bound(g.mass(), g.lp_norm(std::numeric_limits<double>::infinity()));
  Rng rng(31);
  std::vector<PhasePoint> probes(500);
  for (auto& z : probes)
    z = {{rng.uniform(-3, 3), rng.uniform(-3, 3)},
         {rng.uniform(-3, 3), rng.uniform(-3, 3)}};
  for (double e : {0.4, 0.0}) {
    std::optional<MollifierSpec> spec;
    KernelContext kernel;
    if (e > 0) {
      spec.emplace(e);
      kernel = KernelContext(*spec);
    }
    const auto fields = eval_fields_batch(g, probes, kernel, 2);
    for (const auto& f : fields) {
      CHECK(f.velocity.norm() <= bound);
      CHECK(f.acceleration.norm() <= bound);
    }
  }
}

TEST_CASE("swap symmetry between the two field blocks") {
  Rng rng(32);
  std::vector<PhasePoint> pts(40);
  for (auto& z : pts)
    z = {{rng.uniform(-1, 1), rng.uniform(-1, 1)},
         {rng.uniform(-1, 1), rng.uniform(-1, 1)}};
  const auto f = ParticleEnsemble::equal_weights(pts);
  const auto fs = f.swapped_xv();
  const MollifierSpec spec(0.2);
  const KernelContext kernel(spec);
  for (int k = 0; k < 20; ++k) {
    const PhasePoint z{{rng.uniform(-1, 1), rng.uniform(-1, 1)},
                       {rng.uniform(-1, 1), rng.uniform(-1, 1)}};
    const auto direct = eval_fields(f, z, kernel);
    const auto swapped = eval_fields(fs, z.swapped(), kernel);
    CHECK(direct.acceleration.x == swapped.velocity.x);
    CHECK(direct.acceleration.y == swapped.velocity.y);
  }
}

TEST_CASE("screening: sources in the screened region produce no drift") {
  // every source has a velocity separation dominating the position one
  std::vector<PhasePoint> pts;
  Rng rng(33);
  for (int i = 0; i < 30; ++i) {
    const Vec2 x = 0.2 * rng.uniform_direction();
    const Vec2 v = (1.0 + rng.uniform()) * rng.uniform_direction();
    pts.push_back({x, v});
  }
  const auto f = ParticleEnsemble::equal_weights(pts);
  const KernelContext exact;
  const auto [u, a] = eval_fields(f, {{0, 0}, {0, 0}}, exact);
  CHECK(u.norm() == 0.0);
  CHECK(a.norm() > 0.0);  // the swapped kernel sees the complement region
}

TEST_CASE("mollified ensemble fields are divergence free") {
  Rng rng(34);
  std::vector<PhasePoint> pts(50);
  for (auto& z : pts)
    z = {{rng.uniform(-1, 1), rng.uniform(-1, 1)},
         {rng.uniform(-1, 1), rng.uniform(-1, 1)}};
  const auto f = ParticleEnsemble::equal_weights(pts);
  const MollifierSpec spec(0.25);
  const KernelContext kernel(spec);
  const double h = 1e-4;
  for (int k = 0; k < 20; ++k) {
    const PhasePoint z{{rng.uniform(-1, 1), rng.uniform(-1, 1)},
                       {rng.uniform(-1, 1), rng.uniform(-1, 1)}};
    auto u_at = [&](Vec2 x, Vec2 v) {
      return eval_fields(f, {x, v}, kernel);
    };
    const double div =
        (u_at(z.x + Vec2{h, 0}, z.v).velocity.x -
         u_at(z.x - Vec2{h, 0}, z.v).velocity.x +
         u_at(z.x + Vec2{0, h}, z.v).velocity.y -
         u_at(z.x - Vec2{0, h}, z.v).velocity.y +
         u_at(z.x, z.v + Vec2{h, 0}).acceleration.x -
         u_at(z.x, z.v - Vec2{h, 0}).acceleration.x +
         u_at(z.x, z.v + Vec2{0, h}).acceleration.y -
         u_at(z.x, z.v - Vec2{0, h}).acceleration.y) /
        (2.0 * h);
    CHECK(std::abs(div) <= 1e-5);
  }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>

#include "gyro/measures.hpp"
#include "gyro/util/quadrature.hpp"
#include "gyro/util/rng.hpp"

using namespace gyro;

namespace {
const double kInf = std::numeric_limits<double>::infinity();

// polar quadrature oracle for the decay-mass integral, via u = 1/(1+r),
// then u = s^2 to keep the integrand smooth near zero
double kappa_oracle(double gamma) {
  const auto& gl = GaussLegendre::get(128);
  return 2.0 * M_PI * gl.integrate(0.0, 1.0, [&](double s) {
           return 2.0 * (1.0 - s * s) * std::pow(s, 2.0 * gamma - 5.0);
         });
}
}  // namespace

TEST_CASE("kappa closed form vs quadrature oracle") {
  CHECK(kappa(3.0) == doctest::Approx(M_PI).epsilon(1e-15));
  CHECK(kappa(4.0) == doctest::Approx(M_PI / 3.0).epsilon(1e-15));
  for (double g : {2.5, 3.0, 4.0, 6.0})
    CHECK(kappa(g) == doctest::Approx(kappa_oracle(g)).epsilon(1e-10));
  CHECK_THROWS_AS(kappa(2.0), std::domain_error);
}

TEST_CASE("ensemble invariants and first moment") {
  auto f = ParticleEnsemble::equal_weights(
      {{{0, 0}, {0, 0}}, {{1, 0}, {0, 1}}});
  CHECK(f.uniform_weights());
  CHECK(f.first_moment() == doctest::Approx(1.0));

  auto single = ParticleEnsemble::equal_weights({{{0, 0}, {0, 0}}});
  CHECK(single.first_moment() == 0.0);

  auto dirac = ParticleEnsemble::equal_weights({{{1, 0}, {0, 1}}});
  CHECK(dirac.first_moment() == doctest::Approx(2.0));

  // two equal weights at |x|+|v| = 1 and 3 average to 2
  auto two = ParticleEnsemble::equal_weights(
      {{{1, 0}, {0, 0}}, {{3, 0}, {0, 0}}});
  CHECK(two.first_moment() == doctest::Approx(2.0));

  CHECK_THROWS(ParticleEnsemble({{{0, 0}, {0, 0}}}, {0.5}));   // mass != 1
  CHECK_THROWS(ParticleEnsemble({{{0, 0}, {0, 0}}}, {-1.0}));  // negative
}

TEST_CASE("snapshot round-trip is bit exact") {
  Rng rng(7);
  std::vector<PhasePoint> pts(64);
  for (auto& z : pts)
    z = {{rng.uniform(-4, 4), rng.uniform(-4, 4)},
         {rng.uniform(-4, 4), rng.uniform(-4, 4)}};
  const auto f = ParticleEnsemble::equal_weights(pts);
  const std::string path = "test_snapshot_tmp.txt";
  save_snapshot(f, path, {0.3125, 0.1});
  const auto [g, meta] = load_snapshot(path);
  CHECK(meta.time == 0.3125);
  CHECK(meta.eps == 0.1);
  REQUIRE(g.size() == f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    CHECK(f.point(i).x.x == g.point(i).x.x);
    CHECK(f.point(i).x.y == g.point(i).x.y);
    CHECK(f.point(i).v.x == g.point(i).v.x);
    CHECK(f.point(i).v.y == g.point(i).v.y);
    CHECK(f.weight(i) == g.weight(i));
  }
  std::filesystem::remove(path);
}

TEST_CASE("gamma norm on grids") {
  // weight cancels the profile exactly: norm 1 at every cell
  auto profile = [](PhasePoint z) {
    return std::pow((1.0 + z.x.norm()) * (1.0 + z.v.norm()), -3.0);
  };
  const auto g = GridDensity::from_function(profile, 4.0, 8);
  CHECK(g.gamma_norm(3.0).value == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(g.gamma_norm(2.0), std::domain_error);

  // indicator of [0,1]^4: sup of the weight over covered cell centers
  auto box = [](PhasePoint z) {
    return (z.x.x >= 0 && z.x.x <= 1 && z.x.y >= 0 && z.x.y <= 1 &&
            z.v.x >= 0 && z.v.x <= 1 && z.v.y >= 0 && z.v.y <= 1)
               ? 1.0
               : 0.0;
  };
  const int n = 32;
  const auto gb = GridDensity::from_function(box, 4.0, n);
  // the largest covered center is the analytic oracle for this grid
  const double h = 8.0 / n;
  double cmax = -1.0;
  for (int i = 0; i < n; ++i) {
    const double c = -4.0 + (i + 0.5) * h;
    if (c >= 0.0 && c <= 1.0) cmax = std::max(cmax, c);
  }
  const double expect = std::pow((1.0 + std::hypot(cmax, cmax)), 6.0);
  CHECK(gb.gamma_norm(3.0).value == doctest::Approx(expect).epsilon(1e-12));
  // within one cell width of the corner value (1+sqrt(2))^6
  const double corner = std::pow(1.0 + std::sqrt(2.0), 6.0);
  CHECK(corner == doctest::Approx(197.99).epsilon(1e-3));
  CHECK(gb.gamma_norm(3.0).value <= corner);
  CHECK(gb.gamma_norm(3.0).value >=
        std::pow(1.0 + std::sqrt(2.0) * (1.0 - h), 6.0));
}

TEST_CASE("lp norms") {
  // uniform density on a unit-volume box: every norm is 1
  auto unit = [](PhasePoint z) {
    return (std::abs(z.x.x) <= 0.5 && std::abs(z.x.y) <= 0.5 &&
            std::abs(z.v.x) <= 0.5 && std::abs(z.v.y) <= 0.5)
               ? 1.0
               : 0.0;
  };
  const auto g = GridDensity::from_function(unit, 0.5, 8);
  for (double p : {1.0, 2.0, 3.0})
    CHECK(g.lp_norm(p) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(g.lp_norm(kInf) == doctest::Approx(1.0));
  CHECK_THROWS_AS(g.lp_norm(0.5), std::domain_error);

  // homogeneity
  std::vector<double> doubled = g.values();
  for (double& v : doubled) v *= 2.0;
  const GridDensity g2(g.half_width(), g.cells_per_axis(), std::move(doubled));
  for (double p : {1.0, 2.0})
    CHECK(g2.lp_norm(p) == doctest::Approx(2.0 * g.lp_norm(p)).epsilon(1e-12));
  CHECK(g2.lp_norm(kInf) == doctest::Approx(2.0 * g.lp_norm(kInf)));
}

TEST_CASE("product decay profile: factorized mass matches the grid") {
  // the 4D box mass factorizes into the square of a 2D integral; a fine
  // 2D midpoint rule is the oracle for the 4D grid quadrature
  const double L = 4.0;
  auto profile = [](PhasePoint z) {
    return std::pow((1.0 + z.x.norm()) * (1.0 + z.v.norm()), -3.0);
  };
  const auto g = GridDensity::from_function(profile, L, 32);
  const int m = 512;
  const double h = 2.0 * L / m;
  double plane = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const Vec2 y{-L + (i + 0.5) * h, -L + (j + 0.5) * h};
      plane += std::pow(1.0 + y.norm(), -3.0);
    }
  plane *= h * h;
  CHECK(g.lp_norm(1.0) == doctest::Approx(plane * plane).epsilon(0.02));
  // and the box integral sits below the full-space value kappa_3^2
  CHECK(g.lp_norm(1.0) < kappa(3.0) * kappa(3.0));
}

TEST_CASE("norm comparison inequalities on the catalog") {
  const std::vector<InitialCondition> catalog = {
      InitialCondition::two_bump(), InitialCondition::gaussian(),
      InitialCondition::polynomial(), InitialCondition::uniform_box()};
  for (const auto& ic : catalog) {
    const auto g = GridDensity::from_function(
        [&](PhasePoint z) { return ic.density(z); }, 4.0, 12, 2);
    const double gn = g.gamma_norm(3.0).value;
    CHECK(g.lp_norm(kInf) <= gn * (1.0 + 1e-12));
    CHECK(g.lp_norm(1.0) <= kappa(3.0) * kappa(3.0) * gn * (1.0 + 1e-12));
  }
}

TEST_CASE("gamma norm is monotone under pointwise domination") {
  Rng rng(9);
  const int n = 6;
  std::vector<double> a(n * n * n * n), b(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = rng.uniform(0.0, 1.0);
    b[i] = a[i] + rng.uniform(0.0, 0.5);
  }
  const GridDensity fa(2.0, n, std::move(a));
  const GridDensity fb(2.0, n, std::move(b));
  CHECK(fa.gamma_norm(2.5).value <= fb.gamma_norm(2.5).value);
}

TEST_CASE("weight-ratio inequality") {
  Rng rng(10);
  for (int i = 0; i < 100000; ++i) {
    const Vec2 x{rng.uniform(-10, 10), rng.uniform(-10, 10)};
    const Vec2 y{rng.uniform(-10, 10), rng.uniform(-10, 10)};
    CHECK((1.0 + x.norm()) / (1.0 + y.norm()) <=
          (1.0 + (x - y).norm()) * (1.0 + 1e-12));
  }
}

TEST_CASE("initial condition catalog") {
  // uniform box: four points inside, equal weights
  const auto ub = InitialCondition::uniform_box(1.0);
  const auto s = ub.sample(4, 123);
  CHECK(s.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(s.weight(i) == doctest::Approx(0.25));
    CHECK(std::abs(s.point(i).x.x) <= 1.0);
    CHECK(std::abs(s.point(i).v.y) <= 1.0);
  }

  // polynomial profile normalisation at the origin
  const auto poly = InitialCondition::polynomial(4.0);
  CHECK(poly.density({{0, 0}, {0, 0}}) ==
        doctest::Approx(1.0 / (kappa(4.0) * kappa(4.0))).epsilon(1e-12));
  CHECK(poly.linf() ==
        doctest::Approx(std::pow(3.0 / M_PI, 2.0)).epsilon(1e-12));
  CHECK_THROWS_AS(InitialCondition::polynomial(2.0), std::domain_error);
  CHECK_THROWS(InitialCondition::parse("no_such_profile"));

  // two-bump symmetry: sample mean of x vanishes like sigma/sqrt(N)
  const auto tb = InitialCondition::two_bump();
  const std::size_t n = 20000;
  const auto cloud = tb.sample(n, 321);
  Vec2 mean{0, 0};
  for (std::size_t i = 0; i < n; ++i) mean += cloud.point(i).x;
  mean = mean / double(n);
  const double sigma_mean = 1.3 / std::sqrt(double(n));
  CHECK(std::abs(mean.x) <= 3.0 * sigma_mean);
  CHECK(std::abs(mean.y) <= 3.0 * sigma_mean);

  // sampled cloud stays inside the declared support
  for (std::size_t i = 0; i < 100; ++i)
    CHECK(tb.support_distance(cloud.point(i)) == 0.0);
  CHECK(tb.support_distance({{4, 0}, {0, 0}}) > 0.0);
  CHECK(poly.support_distance({{40, 0}, {0, 0}}) == 0.0);  // unbounded

  // sampling matches the density: grid mass of the density is ~1
  for (const auto& ic : {tb, InitialCondition::gaussian()}) {
    const auto g = GridDensity::from_function(
        [&](PhasePoint z) { return ic.density(z); }, 3.0, 24, 2);
    CHECK(g.mass() == doctest::Approx(1.0).epsilon(0.02));
  }
}

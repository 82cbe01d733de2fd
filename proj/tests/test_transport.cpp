#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gyro/transport.hpp"
#include "gyro/util/rng.hpp"

using namespace gyro;

namespace {
ParticleEnsemble random_cloud(Rng& rng, std::size_t n, double scale = 1.0) {
  std::vector<PhasePoint> pts(n);
  for (auto& z : pts)
    z = {{rng.uniform(-scale, scale), rng.uniform(-scale, scale)},
         {rng.uniform(-scale, scale), rng.uniform(-scale, scale)}};
  return ParticleEnsemble::equal_weights(std::move(pts));
}

double brute_force_w1(const ParticleEnsemble& a, const ParticleEnsemble& b) {
  const int n = static_cast<int>(a.size());
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = 1e300;
  do {
    double c = 0.0;
    for (int i = 0; i < n; ++i)
      c += (a.point(i) - b.point(perm[i])).norm();
    best = std::min(best, c / n);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}
}  // namespace

TEST_CASE("distance examples") {
  Rng rng(41);
  const auto mu = random_cloud(rng, 12);
  const auto same = w1_exact(mu, mu);
  CHECK(same.cost == 0.0);
  for (std::size_t i = 0; i < mu.size(); ++i) CHECK(same.pairing[i] == int(i));

  const auto da = ParticleEnsemble::equal_weights({{{0, 0}, {0, 0}}});
  const auto db = ParticleEnsemble::equal_weights({{{1, 0}, {0, 0}}});
  CHECK(w1_exact(da, db).cost == doctest::Approx(1.0));

  const auto a5 = random_cloud(rng, 5);
  const auto b5 = random_cloud(rng, 5);
  CHECK(w1_exact(a5, b5).cost ==
        doctest::Approx(brute_force_w1(a5, b5)).epsilon(1e-12));
}

TEST_CASE("solver equals brute force across sizes") {
  Rng rng(42);
  for (int n = 2; n <= 7; ++n)
    for (int k = 0; k < 25; ++k) {
      const auto a = random_cloud(rng, n);
      const auto b = random_cloud(rng, n);
      const double solver = w1_exact(a, b).cost;
      const double brute = brute_force_w1(a, b);
      CHECK(std::abs(solver - brute) <= 1e-12);
    }
}

TEST_CASE("metric properties") {
  Rng rng(43);
  for (int k = 0; k < 100; ++k) {
    const auto a = random_cloud(rng, 16);
    const auto b = random_cloud(rng, 16);
    const auto c = random_cloud(rng, 16);
    const double ab = w1_exact(a, b).cost;
    const double ba = w1_exact(b, a).cost;
    const double ac = w1_exact(a, c).cost;
    const double cb = w1_exact(c, b).cost;
    CHECK(std::abs(ab - ba) <= 1e-12 * std::max(1.0, ab));
    CHECK(ab <= ac + cb + 1e-12);
  }
}

TEST_CASE("coupling preconditions and cost") {
  Rng rng(44);
  const auto a = random_cloud(rng, 8);
  const auto b = random_cloud(rng, 9);
  CHECK_THROWS_AS(w1_exact(a, b), std::invalid_argument);

  std::vector<double> w(8, 1.0 / 8.0);
  w[0] += 1e-3;
  w[1] -= 1e-3;
  const ParticleEnsemble nonuniform(
      std::vector<PhasePoint>(a.points()), std::move(w));
  CHECK_THROWS_AS(w1_exact(a, nonuniform), std::invalid_argument);

  const auto opt = w1_exact(a, random_cloud(rng, 8));
  // pairing is a permutation
  std::vector<int> sorted = opt.pairing;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 8; ++i) CHECK(sorted[i] == i);
}

TEST_CASE("composed transport and cost series") {
  const auto f0 = ParticleEnsemble::equal_weights(
      {{{1, 0}, {0, 0}}, {{-1, 0}, {0, 0}}});
  const auto g0 = f0.shifted({0.25, 0}, {0, 0});
  const auto t0 = w1_exact(f0, g0);
  CHECK(t0.cost == doctest::Approx(0.25).epsilon(1e-12));

  const MollifierSpec spec(0.05);
  FlowOptions opts;
  opts.horizon = 0.4;
  opts.dt = 0.01;
  opts.threads = 2;
  const auto tf = integrate_flow(f0, spec, opts);
  const auto tg = integrate_flow(g0, spec, opts);

  // t = 0 reproduces the initial coupling
  CHECK(compose_transport(t0, tf, tg, 0.0).cost ==
        doctest::Approx(t0.cost).epsilon(1e-15));

  const std::vector<double> times = {0.0, 0.1, 0.2, 0.3, 0.4};
  const auto series = transport_cost_series(t0, tf, tg, times);
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double composed = compose_transport(t0, tf, tg, times[k]).cost;
    CHECK(series.q[k] == doctest::Approx(composed).epsilon(1e-12));
    // the optimal distance never exceeds the transported coupling cost
    const double w1 =
        w1_exact(tf.ensemble_at(times[k]), tg.ensemble_at(times[k])).cost;
    CHECK(w1 <= composed * (1.0 + 1e-12));
    CHECK(series.q_running[k] >= series.q[k] - 1e-15);
  }

  // single-particle systems are stationary: constant cost
  const auto s0 = ParticleEnsemble::equal_weights({{{0.4, 0}, {0, 0.2}}});
  const auto s1 = s0.shifted({0.1, 0}, {0, 0});
  const auto ts0 = integrate_flow(s0, spec, opts);
  const auto ts1 = integrate_flow(s1, spec, opts);
  const auto id = Coupling::identity(1);
  const auto flat = transport_cost_series(id, ts0, ts1, times);
  for (double q : flat.q) CHECK(q == doctest::Approx(0.1).epsilon(1e-15));

  // identical flows under the identity coupling cost nothing
  const auto zero = transport_cost_series(id, ts0, ts0, times);
  for (double q : zero.q) CHECK(q == 0.0);
}

TEST_CASE("stability envelope formula") {
  CHECK(stability_envelope(0.5, 3.0, 0.0) == doctest::Approx(0.5));
  CHECK(stability_envelope(0.0, 3.0, 10.0) == 0.0);
  CHECK(stability_envelope(1.0, 3.0, 0.1, StabilityConstant::six_sqrt2) ==
        doctest::Approx(14.378438569237420).epsilon(1e-12));
  CHECK(stability_envelope(1.0, 3.0, 0.1, StabilityConstant::six) ==
        doctest::Approx(std::exp(0.6 * M_PI)).epsilon(1e-12));
  CHECK_THROWS_AS(stability_envelope(1.0, 2.0, 0.1), std::domain_error);
  CHECK_THROWS_AS(stability_envelope(1.0, 3.0, -0.1), std::domain_error);
}

TEST_CASE("two-scale comparison envelope") {
  // frozen arithmetic at gamma = 3, unit norms
  const double c = std::pow(2.0, 1.25) / (3.0 * std::sqrt(M_PI));
  const double big_c = 12.0 * 64.0 * M_PI * M_PI;
  CHECK(big_c == doctest::Approx(7579.8561800366274).epsilon(1e-12));
  const double cprime = big_c / (6.0 * c);
  CHECK(cprime == doctest::Approx(2824.3493303488084).epsilon(1e-12));

  const double lg = cauchy_envelope_log(0.1, 0.05, 3.0, 1.0, 1.0, 0.0);
  CHECK(lg == doctest::Approx(std::log(0.15) + cprime).epsilon(1e-12));

  // the plain value overflows gracefully to +inf
  CHECK(std::isinf(cauchy_envelope(0.1, 0.05, 3.0, 1.0, 1.0, 0.0)));

  // continuity in the second scale
  const double l1 = cauchy_envelope_log(0.1, 1e-9, 3.0, 1.0, 1.0, 0.5);
  const double l0 = cauchy_envelope_log(0.1, 0.0, 3.0, 1.0, 1.0, 0.5);
  CHECK(l1 == doctest::Approx(l0).epsilon(1e-6));

  CHECK_THROWS_AS(cauchy_envelope_log(0.0, 0.1, 3.0, 1, 1, 0),
                  std::domain_error);
  CHECK_THROWS_AS(cauchy_envelope_log(1.5, 0.1, 3.0, 1, 1, 0),
                  std::domain_error);
}

#include "gyro/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace gyro {

Coupling Coupling::identity(std::size_t n) {
  Coupling c;
  c.pairing.resize(n);
  std::iota(c.pairing.begin(), c.pairing.end(), 0);
  return c;
}

double coupling_cost(const Coupling& c, const ParticleEnsemble& mu,
                     const ParticleEnsemble& nu) {
  if (c.size() != mu.size() || mu.size() != nu.size())
    throw std::invalid_argument("coupling: size mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i)
    acc += mu.weight(i) * (mu.point(i) - nu.point(c.pairing[i])).norm();
  return acc;
}

namespace {

/// Dense assignment by shortest augmenting paths with potentials.
/// Exact optimum for the given cost matrix, O(n^3).
std::vector<int> solve_assignment(const std::vector<double>& cost,
                                  std::size_t n) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = static_cast<int>(i);
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      const double* row = &cost[(i0 - 1) * n];
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = row[j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = static_cast<int>(j0);
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> match(n);
  for (std::size_t j = 1; j <= n; ++j)
    if (p[j] != 0) match[p[j] - 1] = static_cast<int>(j - 1);
  return match;
}

}  // namespace

Coupling w1_exact(const ParticleEnsemble& mu, const ParticleEnsemble& nu) {
  const std::size_t n = mu.size();
  if (nu.size() != n)
    throw std::invalid_argument("w1_exact: particle counts differ");
  if (!mu.uniform_weights() || !nu.uniform_weights())
    throw std::invalid_argument(
        "w1_exact: general weights are not supported; uniform only");
  std::vector<double> cost(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      cost[i * n + j] = (mu.point(i) - nu.point(j)).norm();
  Coupling c;
  c.pairing = solve_assignment(cost, n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += cost[i * n + c.pairing[i]];
  c.cost = acc / static_cast<double>(n);
  return c;
}

Coupling compose_transport(const Coupling& t0, const FlowTrace& flow_f,
                           const FlowTrace& flow_g, double t) {
  if (t0.size() != flow_f.particles() || t0.size() != flow_g.particles())
    throw std::invalid_argument("compose_transport: size mismatch");
  const auto pf = flow_f.positions_at(t);
  const auto pg = flow_g.positions_at(t);
  Coupling c;
  c.pairing = t0.pairing;
  const auto& w = flow_f.weights();
  double acc = 0.0;
  for (std::size_t i = 0; i < pf.size(); ++i)
    acc += w[i] * (pf[i] - pg[t0.pairing[i]]).norm();
  c.cost = acc;
  return c;
}

TransportCostSeries transport_cost_series(const Coupling& t0,
                                          const FlowTrace& flow_f,
                                          const FlowTrace& flow_g,
                                          const std::vector<double>& times) {
  const std::size_t n = flow_f.particles();
  if (t0.size() != n || flow_g.particles() != n)
    throw std::invalid_argument("cost series: size mismatch");
  if (flow_f.times().size() != flow_g.times().size())
    throw std::invalid_argument("cost series: traces use different grids");
  TransportCostSeries out;
  out.times = times;
  const auto& w = flow_f.weights();
  std::vector<double> running(n, 0.0);
  // running sup taken over the stored step grid up to each report time
  std::size_t step = 0;
  const auto& grid = flow_f.times();
  for (double t : times) {
    while (step < grid.size() && grid[step] <= t + 1e-12) {
      const auto& pf = flow_f.state(step);
      const auto& pg = flow_g.state(step);
      for (std::size_t i = 0; i < n; ++i)
        running[i] =
            std::max(running[i], (pf[i] - pg[t0.pairing[i]]).norm());
      ++step;
    }
    const auto pf = flow_f.positions_at(t);
    const auto pg = flow_g.positions_at(t);
    double q = 0.0, qr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = (pf[i] - pg[t0.pairing[i]]).norm();
      q += w[i] * d;
      qr += w[i] * std::max(running[i], d);
    }
    out.q.push_back(q);
    out.q_running.push_back(qr);
  }
  return out;
}

double stability_envelope(double w1_0, double gamma, double norm_integral,
                          StabilityConstant variant) {
  if (norm_integral < 0.0)
    throw std::domain_error("stability envelope: negative integral");
  const double k =
      variant == StabilityConstant::six ? 6.0 : 6.0 * std::sqrt(2.0);
  return w1_0 * std::exp(k * kappa(gamma) * norm_integral);
}

double cauchy_envelope_log(double eps, double eps_prime, double gamma,
                           double f0_gamma, double f0_linf, double t) {
  if (!(eps > 0.0) || eps > 1.0 || eps_prime < 0.0 || eps_prime > 1.0)
    throw std::domain_error("cauchy envelope: eps must lie in (0, 1]");
  if (gamma <= 2.0) throw std::domain_error("cauchy envelope: gamma <= 2");
  const double c = std::pow(2.0, 1.25) / (3.0 * std::sqrt(M_PI));
  const double alpha = c * std::pow(f0_linf, 0.25);
  const double big_c =
      12.0 * std::pow(2.0, 2.0 * gamma) * M_PI * kappa(gamma) * f0_gamma;
  const double cprime = big_c / (2.0 * gamma * alpha);
  return std::log(eps + eps_prime) +
         cprime * std::pow(1.0 + alpha * t, 2.0 * gamma + 1.0);
}

double cauchy_envelope(double eps, double eps_prime, double gamma,
                       double f0_gamma, double f0_linf, double t) {
  return std::exp(
      cauchy_envelope_log(eps, eps_prime, gamma, f0_gamma, f0_linf, t));
}

}  // namespace gyro

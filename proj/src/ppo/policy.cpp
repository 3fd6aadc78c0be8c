#include <cmath>

#include "p2s/ppo/ppo.hpp"

namespace p2s::ppo {

std::size_t PolicyParams::count(int D, int H, int A) {
  const auto d = static_cast<std::size_t>(D), h = static_cast<std::size_t>(H), a = static_cast<std::size_t>(A);
  return 2 * (h * d + h) + a * h + a + h + 1;
}

PolicyParams zero_params(int D, int H, int A) {
  if (D <= 0 || H <= 0 || A <= 0) throw DimensionMismatch("policy dimensions must be positive");
  PolicyParams p{D, H, A, {}};
  p.theta.assign(PolicyParams::count(D, H, A), 0.0);
  return p;
}

PolicyParams init_params(int D, int H, int A, Rng& rng) {
  PolicyParams p = zero_params(D, H, A);
  const double lim = std::sqrt(6.0 / (D + H));
  const std::size_t n = static_cast<std::size_t>(H * D);
  for (std::size_t i = 0; i < n; ++i) p.theta[p.off_w1() + i] = rng.uniform(-lim, lim);
  for (std::size_t i = 0; i < n; ++i) p.theta[p.off_v1() + i] = rng.uniform(-lim, lim);
  return p;
}

PolicyParams random_params(int D, int H, int A, Rng& rng, double scale) {
  PolicyParams p = zero_params(D, H, A);
  for (double& w : p.theta) w = rng.uniform(-scale, scale);
  return p;
}

namespace {

void check_dim(const PolicyParams& p, std::span<const double> s) {
  if (static_cast<int>(s.size()) != p.D) {
    throw DimensionMismatch("state has dimension " + std::to_string(s.size()) + ", policy expects " +
                            std::to_string(p.D));
  }
}

}  // namespace

std::vector<double> actor_forward(const PolicyParams& p, std::span<const double> s) {
  check_dim(p, s);
  const double* th = p.theta.data();
  std::vector<double> h(static_cast<std::size_t>(p.H));
  for (int j = 0; j < p.H; ++j) {
    double acc = th[p.off_b1() + j];
    const double* row = th + p.off_w1() + static_cast<std::size_t>(j * p.D);
    for (int i = 0; i < p.D; ++i) acc += row[i] * s[i];
    h[j] = std::tanh(acc);
  }
  std::vector<double> z(static_cast<std::size_t>(p.A));
  double zmax = -INFINITY;
  for (int k = 0; k < p.A; ++k) {
    double acc = th[p.off_b2() + k];
    const double* row = th + p.off_w2() + static_cast<std::size_t>(k * p.H);
    for (int j = 0; j < p.H; ++j) acc += row[j] * h[j];
    z[k] = acc;
    zmax = std::max(zmax, acc);
  }
  double sum = 0.0;
  for (double& v : z) {
    v = std::exp(v - zmax);
    sum += v;
  }
  for (double& v : z) v /= sum;
  return z;
}

double critic_forward(const PolicyParams& p, std::span<const double> s) {
  check_dim(p, s);
  const double* th = p.theta.data();
  double v = th[p.off_c2()];
  for (int j = 0; j < p.H; ++j) {
    double acc = th[p.off_c1() + j];
    const double* row = th + p.off_v1() + static_cast<std::size_t>(j * p.D);
    for (int i = 0; i < p.D; ++i) acc += row[i] * s[i];
    v += th[p.off_v2() + j] * std::tanh(acc);
  }
  return v;
}

Sample sample_action(std::span<const double> dist, Rng& rng) {
  if (dist.empty()) throw Error("sample_action: empty distribution");
  const double u = rng.uniform();
  double cum = 0.0;
  int last_positive = -1;
  for (std::size_t k = 0; k < dist.size(); ++k) {
    if (dist[k] <= 0.0) continue;
    last_positive = static_cast<int>(k);
    cum += dist[k];
    if (u < cum) return {static_cast<int>(k), std::log(dist[k])};
  }
  // Rounding left u just above the cumulative mass.
  if (last_positive < 0) throw Error("sample_action: distribution has no mass");
  return {last_positive, std::log(dist[static_cast<std::size_t>(last_positive)])};
}

}  // namespace p2s::ppo

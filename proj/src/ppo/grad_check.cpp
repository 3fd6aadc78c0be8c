#include <algorithm>
#include <cmath>
#include <numeric>

#include "p2s/ppo/ppo.hpp"

namespace p2s::ppo {

std::vector<Transition> random_batch(const PolicyParams& p, int n, Rng& rng) {
  std::vector<Transition> out;
  for (int i = 0; i < n; ++i) {
    Transition t;
    t.state.resize(static_cast<std::size_t>(p.D));
    for (auto& x : t.state) x = rng.uniform();
    const auto dist = actor_forward(p, t.state);
    const Sample s = sample_action(dist, rng);
    t.action = s.action;
    t.log_prob_old = s.log_prob + rng.uniform(-0.4, 0.4);
    t.reward = rng.uniform(-2.0, 2.0);
    t.value_old = rng.uniform(-1.0, 1.0);
    t.done = (i + 1) % 4 == 0 || i + 1 == n;
    out.push_back(std::move(t));
  }
  return out;
}

double grad_check(const PolicyParams& p, std::span<const Transition> batch, const PpoConfig& cfg, Rng& rng,
                  int samples, BackpropFault fault, double h) {
  const auto returns = batch_returns(batch, cfg.gamma);
  const auto adv = compute_advantages(batch, returns, cfg.advantage_norm);
  const LossResult analytic = loss_and_grad(p, batch, adv, returns, cfg, fault);

  std::vector<std::size_t> idx(p.theta.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  const std::size_t k = std::min(idx.size(), static_cast<std::size_t>(std::max(samples, 0)));
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t j = i + static_cast<std::size_t>(rng.below(idx.size() - i));
    std::swap(idx[i], idx[j]);
  }

  PolicyParams q = p;
  double worst = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t w = idx[i];
    const double orig = q.theta[w];
    q.theta[w] = orig + h;
    const double up = loss_only(q, batch, adv, returns, cfg);
    q.theta[w] = orig - h;
    const double down = loss_only(q, batch, adv, returns, cfg);
    q.theta[w] = orig;
    const double gn = (up - down) / (2.0 * h);
    const double ga = analytic.grad[w];
    worst = std::max(worst, std::abs(ga - gn) / std::max(1e-8, std::abs(ga) + std::abs(gn)));
  }
  return worst;
}

}  // namespace p2s::ppo

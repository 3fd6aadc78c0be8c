#include <cmath>

#include "p2s/ppo/ppo.hpp"

namespace p2s::ppo {

void PpoConfig::validate() const {
  if (!(clip_epsilon > 0 && clip_epsilon < 1)) throw ConfigError("ppo.clip_epsilon must be in (0, 1)");
  if (!(grad_clip_norm > 0)) throw ConfigError("ppo.grad_clip_norm must be positive");
  if (!(gamma > 0 && gamma <= 1)) throw ConfigError("ppo.gamma must be in (0, 1]");
  if (!(lr >= 0)) throw ConfigError("ppo.lr must be non-negative");
  if (epochs_per_batch < 1) throw ConfigError("ppo.epochs_per_batch must be >= 1");
  if (!(adam_beta1 >= 0 && adam_beta1 < 1 && adam_beta2 >= 0 && adam_beta2 < 1))
    throw ConfigError("ppo adam betas must be in [0, 1)");
  if (!(adam_eps > 0)) throw ConfigError("ppo.adam_eps must be positive");
}

AdamState AdamState::for_params(const PolicyParams& p) {
  return {std::vector<double>(p.theta.size(), 0.0), std::vector<double>(p.theta.size(), 0.0), 0};
}

double clip_grad_norm(std::vector<double>& g, double max_norm) {
  double sq = 0.0;
  for (double x : g) sq += x * x;
  const double norm = std::sqrt(sq);
  if (norm > max_norm) {
    const double scale = max_norm / norm;
    for (double& x : g) x *= scale;
  }
  return norm;
}

void adam_step(PolicyParams& p, AdamState& st, const std::vector<double>& g, const PpoConfig& cfg) {
  if (st.m.size() != p.theta.size()) st = AdamState::for_params(p);
  ++st.step;
  const double c1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(st.step));
  const double c2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(st.step));
  for (std::size_t i = 0; i < p.theta.size(); ++i) {
    st.m[i] = cfg.adam_beta1 * st.m[i] + (1.0 - cfg.adam_beta1) * g[i];
    st.v[i] = cfg.adam_beta2 * st.v[i] + (1.0 - cfg.adam_beta2) * g[i] * g[i];
    const double mhat = st.m[i] / c1;
    const double vhat = st.v[i] / c2;
    p.theta[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.adam_eps);
  }
}

UpdateResult ppo_update(PolicyParams& p, std::span<const Transition> batch, const PpoConfig& cfg, AdamState& opt,
                        std::int64_t batch_id, BackpropFault fault) {
  if (batch.empty()) throw Error("ppo_update: empty batch");
  const auto returns = batch_returns(batch, cfg.gamma);
  const auto adv = compute_advantages(batch, returns, cfg.advantage_norm);

  UpdateResult res;
  for (int epoch = 0; epoch < cfg.epochs_per_batch; ++epoch) {
    LossResult lr = loss_and_grad(p, batch, adv, returns, cfg, fault);
    bool finite = std::isfinite(lr.stats.total);
    for (double x : lr.grad) finite = finite && std::isfinite(x);
    if (!finite) throw NonFiniteLoss(batch_id);
    lr.stats.grad_norm = clip_grad_norm(lr.grad, cfg.grad_clip_norm);
    adam_step(p, opt, lr.grad, cfg);
    res.epochs.push_back(lr.stats);
  }
  return res;
}

}  // namespace p2s::ppo

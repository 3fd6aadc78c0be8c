#include <algorithm>
#include <cmath>

#include "p2s/ppo/ppo.hpp"

namespace p2s::ppo {

double unclipped_surrogate(double ratio, double advantage) { return ratio * advantage; }

double clipped_surrogate(double ratio, double advantage, double eps) {
  return std::min(ratio * advantage, std::clamp(ratio, 1.0 - eps, 1.0 + eps) * advantage);
}

double surrogate_ratio_grad(double ratio, double advantage, double eps) {
  const double unclipped = ratio * advantage;
  const double clipped = std::clamp(ratio, 1.0 - eps, 1.0 + eps) * advantage;
  return unclipped <= clipped ? advantage : 0.0;
}

namespace {

struct Forward {
  std::vector<double> h;     // actor hidden
  std::vector<double> logp;  // log-softmax
  std::vector<double> g;     // critic hidden
  double v = 0.0;
};

Forward forward(const PolicyParams& p, std::span<const double> s) {
  if (static_cast<int>(s.size()) != p.D) throw DimensionMismatch("transition state dimension mismatch");
  const double* th = p.theta.data();
  Forward f;
  f.h.resize(static_cast<std::size_t>(p.H));
  f.g.resize(static_cast<std::size_t>(p.H));
  for (int j = 0; j < p.H; ++j) {
    double a = th[p.off_b1() + j];
    double c = th[p.off_c1() + j];
    const double* wa = th + p.off_w1() + static_cast<std::size_t>(j * p.D);
    const double* wc = th + p.off_v1() + static_cast<std::size_t>(j * p.D);
    for (int i = 0; i < p.D; ++i) {
      a += wa[i] * s[i];
      c += wc[i] * s[i];
    }
    f.h[j] = std::tanh(a);
    f.g[j] = std::tanh(c);
  }
  f.logp.resize(static_cast<std::size_t>(p.A));
  double zmax = -INFINITY;
  for (int k = 0; k < p.A; ++k) {
    double z = th[p.off_b2() + k];
    const double* row = th + p.off_w2() + static_cast<std::size_t>(k * p.H);
    for (int j = 0; j < p.H; ++j) z += row[j] * f.h[j];
    f.logp[k] = z;
    zmax = std::max(zmax, z);
  }
  double sum = 0.0;
  for (double z : f.logp) sum += std::exp(z - zmax);
  const double lse = zmax + std::log(sum);
  for (double& z : f.logp) z -= lse;
  f.v = th[p.off_c2()];
  for (int j = 0; j < p.H; ++j) f.v += th[p.off_v2() + j] * f.g[j];
  return f;
}

void check_batch(const PolicyParams& p, std::span<const Transition> batch, std::span<const double> adv,
                 std::span<const double> ret) {
  if (batch.empty()) throw Error("empty PPO batch");
  if (adv.size() != batch.size() || ret.size() != batch.size()) throw Error("advantage/return size mismatch");
  for (const auto& t : batch) {
    if (t.action < 0 || t.action >= p.A) throw DimensionMismatch("transition action out of range");
  }
}

}  // namespace

LossResult loss_and_grad(const PolicyParams& p, std::span<const Transition> batch, std::span<const double> advantages,
                         std::span<const double> returns, const PpoConfig& cfg, BackpropFault fault) {
  check_batch(p, batch, advantages, returns);
  const double n = static_cast<double>(batch.size());
  const double* th = p.theta.data();
  LossResult out;
  out.grad.assign(p.theta.size(), 0.0);
  double* gr = out.grad.data();
  std::vector<double> dz(static_cast<std::size_t>(p.A));
  std::vector<double> dpre(static_cast<std::size_t>(p.H));
  int clipped = 0;

  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Transition& tr = batch[i];
    const Forward f = forward(p, tr.state);
    const double adv = advantages[i];
    const double ratio = std::exp(f.logp[tr.action] - tr.log_prob_old);
    out.stats.policy_loss -= clipped_surrogate(ratio, adv, cfg.clip_epsilon) / n;
    if (std::abs(ratio - 1.0) > cfg.clip_epsilon) ++clipped;

    double ent = 0.0;
    for (double lp : f.logp) ent -= std::exp(lp) * lp;
    out.stats.entropy += ent / n;

    const double err = f.v - returns[i];
    out.stats.value_loss += err * err / n;

    // Actor: logits gradient from surrogate and entropy terms.
    const double d_logpa = -surrogate_ratio_grad(ratio, adv, cfg.clip_epsilon) * ratio / n;
    for (int k = 0; k < p.A; ++k) {
      const double pk = std::exp(f.logp[k]);
      dz[k] = d_logpa * ((k == tr.action ? 1.0 : 0.0) - pk) + cfg.entropy_coef / n * pk * (f.logp[k] + ent);
    }
    for (int j = 0; j < p.H; ++j) dpre[j] = 0.0;
    for (int k = 0; k < p.A; ++k) {
      gr[p.off_b2() + k] += dz[k];
      double* gw = gr + p.off_w2() + static_cast<std::size_t>(k * p.H);
      const double* w = th + p.off_w2() + static_cast<std::size_t>(k * p.H);
      for (int j = 0; j < p.H; ++j) {
        gw[j] += dz[k] * f.h[j];
        dpre[j] += dz[k] * w[j];
      }
    }
    for (int j = 0; j < p.H; ++j) {
      const double dtanh = 1.0 - f.h[j] * f.h[j];
      dpre[j] *= fault == BackpropFault::kFlipHiddenDerivative ? -dtanh : dtanh;
      gr[p.off_b1() + j] += dpre[j];
      double* gw = gr + p.off_w1() + static_cast<std::size_t>(j * p.D);
      for (int d = 0; d < p.D; ++d) gw[d] += dpre[j] * tr.state[d];
    }

    // Critic.
    double dv = cfg.value_coef * 2.0 * err / n;
    if (fault == BackpropFault::kFlipCriticOutput) dv = -dv;
    gr[p.off_c2()] += dv;
    for (int j = 0; j < p.H; ++j) {
      gr[p.off_v2() + j] += dv * f.g[j];
      const double dg = dv * th[p.off_v2() + j] * (1.0 - f.g[j] * f.g[j]);
      gr[p.off_c1() + j] += dg;
      double* gw = gr + p.off_v1() + static_cast<std::size_t>(j * p.D);
      for (int d = 0; d < p.D; ++d) gw[d] += dg * tr.state[d];
    }
  }
  out.stats.clip_fraction = clipped / n;
  out.stats.total =
      out.stats.policy_loss + cfg.value_coef * out.stats.value_loss - cfg.entropy_coef * out.stats.entropy;
  return out;
}

double loss_only(const PolicyParams& p, std::span<const Transition> batch, std::span<const double> advantages,
                 std::span<const double> returns, const PpoConfig& cfg) {
  check_batch(p, batch, advantages, returns);
  const double n = static_cast<double>(batch.size());
  double pl = 0.0, vl = 0.0, ent = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Forward f = forward(p, batch[i].state);
    const double ratio = std::exp(f.logp[batch[i].action] - batch[i].log_prob_old);
    pl -= clipped_surrogate(ratio, advantages[i], cfg.clip_epsilon) / n;
    const double err = f.v - returns[i];
    vl += err * err / n;
    for (double lp : f.logp) ent -= std::exp(lp) * lp / n;
  }
  return pl + cfg.value_coef * vl - cfg.entropy_coef * ent;
}

}  // namespace p2s::ppo

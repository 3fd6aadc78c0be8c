#include <cmath>

#include "p2s/ppo/ppo.hpp"

namespace p2s::ppo {

std::vector<double> compute_returns(std::span<const double> rewards, double gamma) {
  std::vector<double> g(rewards.size());
  double acc = 0.0;
  for (std::size_t i = rewards.size(); i-- > 0;) {
    acc = rewards[i] + gamma * acc;
    g[i] = acc;
  }
  return g;
}

std::vector<double> batch_returns(std::span<const Transition> batch, double gamma) {
  std::vector<double> g(batch.size());
  double acc = 0.0;
  for (std::size_t i = batch.size(); i-- > 0;) {
    if (batch[i].done) acc = 0.0;
    acc = batch[i].reward + gamma * acc;
    g[i] = acc;
  }
  return g;
}

std::vector<double> compute_advantages(std::span<const Transition> batch, std::span<const double> returns,
                                       bool normalize) {
  std::vector<double> a(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) a[i] = returns[i] - batch[i].value_old;
  if (normalize && !a.empty()) {
    double mean = 0.0;
    for (double x : a) mean += x;
    mean /= static_cast<double>(a.size());
    double var = 0.0;
    for (double x : a) var += (x - mean) * (x - mean);
    const double sd = std::sqrt(var / static_cast<double>(a.size()));
    for (double& x : a) x = (x - mean) / (sd + 1e-8);
  }
  return a;
}

}  // namespace p2s::ppo

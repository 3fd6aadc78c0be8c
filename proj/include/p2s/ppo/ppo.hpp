#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "p2s/util/error.hpp"
#include "p2s/util/rng.hpp"

namespace p2s::ppo {

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class NonFiniteLoss : public Error {
 public:
  explicit NonFiniteLoss(std::int64_t batch_id)
      : Error("non-finite loss in batch " + std::to_string(batch_id)), batch_id_(batch_id) {}
  std::int64_t batch_id() const { return batch_id_; }

 private:
  std::int64_t batch_id_;
};

/// Actor D->H(tanh)->A softmax and critic D->H(tanh)->1, stored flat:
///   actor  W1[H*D] b1[H] W2[A*H] b2[A]
///   critic V1[H*D] c1[H] v2[H]   c2[1]
struct PolicyParams {
  int D = 0;
  int H = 0;
  int A = 0;
  std::vector<double> theta;

  static std::size_t count(int D, int H, int A);

  std::size_t off_w1() const { return 0; }
  std::size_t off_b1() const { return off_w1() + static_cast<std::size_t>(H * D); }
  std::size_t off_w2() const { return off_b1() + static_cast<std::size_t>(H); }
  std::size_t off_b2() const { return off_w2() + static_cast<std::size_t>(A * H); }
  std::size_t off_v1() const { return off_b2() + static_cast<std::size_t>(A); }
  std::size_t off_c1() const { return off_v1() + static_cast<std::size_t>(H * D); }
  std::size_t off_v2() const { return off_c1() + static_cast<std::size_t>(H); }
  std::size_t off_c2() const { return off_v2() + static_cast<std::size_t>(H); }

  friend bool operator==(const PolicyParams&, const PolicyParams&) = default;
};

/// Hidden layers uniform in +-sqrt(6/(fan_in+fan_out)); output layers and
/// biases zero, so the initial policy is exactly uniform.
PolicyParams init_params(int D, int H, int A, Rng& rng);
PolicyParams zero_params(int D, int H, int A);
/// Every weight uniform in +-scale, output layers included. For gradient
/// checks, where zero output layers would hide hidden-layer gradients.
PolicyParams random_params(int D, int H, int A, Rng& rng, double scale = 0.5);

std::vector<double> actor_forward(const PolicyParams& p, std::span<const double> s);
double critic_forward(const PolicyParams& p, std::span<const double> s);

struct Sample {
  int action = 0;
  double log_prob = 0.0;
};
Sample sample_action(std::span<const double> dist, Rng& rng);

struct Transition {
  std::vector<double> state;
  int action = 0;
  double log_prob_old = 0.0;
  double reward = 0.0;
  double value_old = 0.0;
  bool done = false;
};

/// G_t = r_t + gamma * G_{t+1}, reverse accumulation.
std::vector<double> compute_returns(std::span<const double> rewards, double gamma);
/// Returns over a batch of concatenated episodes; accumulation restarts
/// after every `done` transition (a trailing unfinished episode bootstraps 0).
std::vector<double> batch_returns(std::span<const Transition> batch, double gamma);

struct PpoConfig {
  double clip_epsilon = 0.2;
  double gamma = 0.99;
  double lr = 3e-4;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  double grad_clip_norm = 1.0;
  int epochs_per_batch = 4;
  double entropy_coef = 0.01;
  double value_coef = 0.5;
  bool advantage_norm = true;
  std::uint64_t seed = 0;

  void validate() const;
};

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::int64_t step = 0;

  static AdamState for_params(const PolicyParams& p);
  friend bool operator==(const AdamState&, const AdamState&) = default;
};

struct LossStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double clip_fraction = 0.0;
  double total = 0.0;
  double grad_norm = 0.0;
};

/// Test hook: corrupts one backprop term so the gradient checker can be
/// shown to catch it.
enum class BackpropFault { kNone, kFlipHiddenDerivative, kFlipCriticOutput };

struct LossResult {
  LossStats stats;
  std::vector<double> grad;  // d total / d theta, same layout as theta
};

/// Total loss L_actor + value_coef*L_critic - entropy_coef*H with fixed
/// per-sample advantages and return targets.
LossResult loss_and_grad(const PolicyParams& p, std::span<const Transition> batch, std::span<const double> advantages,
                         std::span<const double> returns, const PpoConfig& cfg,
                         BackpropFault fault = BackpropFault::kNone);

double loss_only(const PolicyParams& p, std::span<const Transition> batch, std::span<const double> advantages,
                 std::span<const double> returns, const PpoConfig& cfg);

/// Per-sample clipped surrogate min(r*A, clip(r, 1-eps, 1+eps)*A).
double clipped_surrogate(double ratio, double advantage, double eps);
double unclipped_surrogate(double ratio, double advantage);
/// d surrogate / d ratio; zero when the clipped branch is selected and active.
double surrogate_ratio_grad(double ratio, double advantage, double eps);

/// G - V_old, optionally normalized to zero mean and unit variance.
std::vector<double> compute_advantages(std::span<const Transition> batch, std::span<const double> returns,
                                       bool normalize);

/// Rescales g in place so its L2 norm is at most max_norm; returns the
/// pre-clip norm.
double clip_grad_norm(std::vector<double>& g, double max_norm);
void adam_step(PolicyParams& p, AdamState& st, const std::vector<double>& g, const PpoConfig& cfg);

struct UpdateResult {
  std::vector<LossStats> epochs;
};

UpdateResult ppo_update(PolicyParams& p, std::span<const Transition> batch, const PpoConfig& cfg, AdamState& opt,
                        std::int64_t batch_id = 0, BackpropFault fault = BackpropFault::kNone);

/// Random transitions for `p`: uniform states, sampled actions, old
/// log-probs jittered so ratios land on both sides of the clip range.
std::vector<Transition> random_batch(const PolicyParams& p, int n, Rng& rng);

/// Max relative error between analytic and central-difference gradients
/// over `samples` randomly chosen parameters.
double grad_check(const PolicyParams& p, std::span<const Transition> batch, const PpoConfig& cfg, Rng& rng,
                  int samples = 64, BackpropFault fault = BackpropFault::kNone, double h = 1e-5);

struct Checkpoint {
  PolicyParams params;
  AdamState adam;
  std::int64_t episode = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

void save_checkpoint(const Checkpoint& ck, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace p2s::ppo

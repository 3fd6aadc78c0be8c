#include <cmath>
#include <numeric>

#include "doctest.h"
#include "p2s/ppo/ppo.hpp"
#include "support.hpp"

using namespace p2s;
using namespace p2s::ppo;

TEST_CASE("discounted returns") {
  std::vector<double> r{-1.1, -1.1, 10.0};
  auto g = compute_returns(r, 0.99);
  CHECK(std::abs(g[0] - 7.612) < 1e-9);
  CHECK(std::abs(g[2] - 10.0) < 1e-12);

  Rng rng(1);
  for (int k = 0; k < 100; ++k) {
    std::vector<double> rs(1 + rng.below(7));
    for (auto& x : rs) x = rng.uniform(-5, 10);
    auto gs = compute_returns(rs, 0.99);
    for (size_t t = 0; t + 1 < rs.size(); ++t) CHECK(std::abs(gs[t] - (rs[t] + 0.99 * gs[t + 1])) < 1e-12);
    CHECK(gs.back() == rs.back());
  }
  CHECK(compute_returns({}, 0.99).empty());
}

TEST_CASE("batch returns restart at episode boundaries") {
  std::vector<Transition> b(4);
  b[0].reward = 1;
  b[1].reward = 2;
  b[1].done = true;
  b[2].reward = 3;
  b[3].reward = 4;
  auto g = batch_returns(b, 0.5);
  CHECK(g[1] == 2.0);
  CHECK(g[0] == 2.0);
  CHECK(g[3] == 4.0);
  CHECK(g[2] == 5.0);
}

TEST_CASE("clip semantics") {
  CHECK(clipped_surrogate(1.3, 2.0, 0.2) == doctest::Approx(2.4).epsilon(1e-15));
  CHECK(surrogate_ratio_grad(1.3, 2.0, 0.2) == 0.0);
  CHECK(surrogate_ratio_grad(0.7, -2.0, 0.2) == 0.0);
  CHECK(surrogate_ratio_grad(1.3, -2.0, 0.2) == -2.0);
  for (double r = 0.8; r <= 1.2; r += 0.01) {
    for (double a : {-3.0, -0.5, 0.0, 0.7, 2.0}) {
      CHECK(clipped_surrogate(r, a, 0.2) == unclipped_surrogate(r, a));
      CHECK(surrogate_ratio_grad(r, a, 0.2) == a);
    }
  }
}

TEST_CASE("init is uniform and forward outputs are distributions") {
  Rng rng(2);
  auto p = init_params(24, 32, 12, rng);
  CHECK(p.theta.size() == PolicyParams::count(24, 32, 12));
  std::vector<double> s(24, 0.3);
  auto d = actor_forward(p, s);
  for (double x : d) CHECK(x == doctest::Approx(1.0 / 12));
  CHECK(critic_forward(p, s) == 0.0);

  auto q = random_params(24, 8, 12, rng, 3.0);
  for (int i = 0; i < 200; ++i) {
    for (auto& x : s) x = rng.uniform(-5, 5);
    auto dist = actor_forward(q, s);
    CHECK(std::accumulate(dist.begin(), dist.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    for (double x : dist) CHECK(x >= 0.0);
    auto smp = sample_action(dist, rng);
    CHECK(smp.action >= 0);
    CHECK(smp.action < 12);
    CHECK(smp.log_prob == doctest::Approx(std::log(dist[static_cast<size_t>(smp.action)])));
  }
  CHECK_THROWS_AS(actor_forward(q, std::vector<double>(23)), DimensionMismatch);
}

TEST_CASE("analytic gradients match finite differences") {
  PpoConfig cfg;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Rng rng(seed);
    auto p = random_params(24, 8, 12, rng);
    auto batch = random_batch(p, 16, rng);
    Rng pick(seed);
    CHECK(grad_check(p, batch, cfg, pick) < 1e-4);
    Rng pick2(seed);
    CHECK(grad_check(p, batch, cfg, pick2, 64, BackpropFault::kFlipHiddenDerivative) > 1e-2);
    Rng pick3(seed);
    CHECK(grad_check(p, batch, cfg, pick3, 64, BackpropFault::kFlipCriticOutput) > 1e-2);
  }
}

TEST_CASE("gradient clipping") {
  std::vector<double> g{3.0, 4.0};
  CHECK(clip_grad_norm(g, 1.0) == doctest::Approx(5.0));
  CHECK(g[0] == doctest::Approx(0.6));
  CHECK(g[1] == doctest::Approx(0.8));
  std::vector<double> small{0.1, 0.1};
  clip_grad_norm(small, 1.0);
  CHECK(small[0] == 0.1);
}

TEST_CASE("ppo update lowers the loss on a fixed batch and is deterministic") {
  Rng rng(5);
  auto p = random_params(24, 8, 12, rng, 0.3);
  auto batch = random_batch(p, 32, rng);
  PpoConfig cfg;
  cfg.lr = 1e-2;
  auto returns = batch_returns(batch, cfg.gamma);
  auto adv = compute_advantages(batch, returns, true);
  const double before = loss_only(p, batch, adv, returns, cfg);

  auto p1 = p, p2 = p;
  auto o1 = AdamState::for_params(p), o2 = AdamState::for_params(p);
  ppo_update(p1, batch, cfg, o1);
  ppo_update(p2, batch, cfg, o2);
  CHECK(p1 == p2);
  CHECK(o1 == o2);
  CHECK(o1.step == cfg.epochs_per_batch);
  CHECK(loss_only(p1, batch, adv, returns, cfg) < before);
}

TEST_CASE("non-finite loss aborts the update") {
  Rng rng(6);
  auto p = random_params(24, 8, 12, rng);
  auto batch = random_batch(p, 4, rng);
  batch[0].reward = std::nan("");
  auto opt = AdamState::for_params(p);
  auto before = p;
  try {
    ppo_update(p, batch, PpoConfig{}, opt, 42);
    FAIL("expected NonFiniteLoss");
  } catch (const NonFiniteLoss& e) {
    CHECK(e.batch_id() == 42);
  }
  CHECK(p == before);
}

TEST_CASE("advantages are normalized") {
  Rng rng(7);
  auto p = random_params(24, 8, 12, rng);
  auto batch = random_batch(p, 20, rng);
  for (auto& t : batch) t.reward = rng.uniform(-2, 10);
  auto ret = batch_returns(batch, 0.99);
  auto adv = compute_advantages(batch, ret, true);
  double mean = std::accumulate(adv.begin(), adv.end(), 0.0) / adv.size();
  double var = 0;
  for (double a : adv) var += (a - mean) * (a - mean);
  var /= adv.size();
  CHECK(std::abs(mean) < 1e-9);
  CHECK(var == doctest::Approx(1.0).epsilon(1e-6));
  auto raw = compute_advantages(batch, ret, false);
  CHECK(raw[0] == doctest::Approx(ret[0] - batch[0].value_old));
}

TEST_CASE("checkpoint round trip is exact") {
  testing::TempDir tmp;
  Rng rng(8);
  Checkpoint ck;
  ck.params = random_params(24, 8, 12, rng);
  ck.adam = AdamState::for_params(ck.params);
  for (auto& m : ck.adam.m) m = rng.uniform(-1, 1) * 1e-7;
  ck.adam.step = 17;
  ck.episode = 1234;
  ck.seed = 99;
  save_checkpoint(ck, tmp / "c.json");
  CHECK(load_checkpoint(tmp / "c.json") == ck);
  CHECK_THROWS(load_checkpoint(tmp / "missing.json"));
}

TEST_CASE("config validation") {
  PpoConfig c;
  CHECK_NOTHROW(c.validate());
  c.clip_epsilon = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = PpoConfig{};
  c.lr = -1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

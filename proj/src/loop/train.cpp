#include <fmt/format.h>

#include "p2s/loop/loop.hpp"
#include "p2s/util/text.hpp"

namespace p2s::loop {

std::string curve_csv_header() { return "episode,reward,policy_loss,value_loss,entropy,success"; }

std::string curve_csv_row(const CurveRow& r) {
  return fmt::format("{},{},{},{},{},{}", r.episode, r.reward, r.policy_loss, r.value_loss, r.entropy,
                     r.success ? 1 : 0);
}

std::string curve_csv(const std::vector<CurveRow>& rows) {
  std::string out = curve_csv_header() + "\n";
  for (const auto& r : rows) out += curve_csv_row(r) + "\n";
  return out;
}

std::vector<CurveRow> parse_curve_csv(const std::string& text) {
  auto lines = split_lines(text);
  if (lines.empty() || trim(lines[0]) != curve_csv_header()) throw Error("training log has no valid header");
  std::vector<CurveRow> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (is_blank(lines[i])) continue;
    std::vector<std::string> f;
    std::string cur;
    for (char c : lines[i]) {
      if (c == ',') {
        f.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    f.push_back(cur);
    if (f.size() != 6) throw Error(fmt::format("training log line {}: expected 6 fields", i + 1));
    try {
      rows.push_back({std::stoll(f[0]), std::stod(f[1]), std::stod(f[2]), std::stod(f[3]), std::stod(f[4]),
                      std::stoi(f[5]) != 0});
    } catch (const std::exception&) {
      throw Error(fmt::format("training log line {}: bad number", i + 1));
    }
  }
  return rows;
}

TrainResult train_policy(const std::vector<task::TaskSpec>& corpus, Environment& env, const ppo::PpoConfig& ppo_cfg,
                         const LoopConfig& loop_cfg, const TrainConfig& train_cfg,
                         std::optional<ppo::PolicyParams> initial) {
  if (corpus.empty()) throw Error("train_policy: empty corpus");
  ppo_cfg.validate();
  loop_cfg.validate();
  if (train_cfg.batch_episodes < 1) throw ConfigError("train.batch_episodes must be >= 1");

  Rng root(train_cfg.seed);
  Rng init_rng = root.fork(1);
  Rng task_rng = root.fork(2);
  Rng act_rng = root.fork(3);

  TrainResult out;
  out.params = initial ? std::move(*initial)
                       : ppo::init_params(mdp::kStateDim, train_cfg.hidden, mdp::kActionCount, init_rng);
  out.adam = ppo::AdamState::for_params(out.params);

  LoopConfig lc = loop_cfg;
  lc.collect_for_training = true;

  auto save = [&](std::int64_t ep) {
    if (!train_cfg.checkpoint_dir) return;
    ppo::Checkpoint ck{out.params, out.adam, ep, train_cfg.seed};
    ppo::save_checkpoint(ck, *train_cfg.checkpoint_dir / fmt::format("ckpt_{:06d}.json", ep));
    ppo::save_checkpoint(ck, *train_cfg.checkpoint_dir / "latest.json");
  };

  std::vector<ppo::Transition> batch;
  int in_batch = 0;
  std::int64_t batch_id = 0;
  ppo::LossStats last;
  for (std::int64_t ep = 1; ep <= train_cfg.episodes; ++ep) {
    const auto& task = corpus[static_cast<std::size_t>(task_rng.below(corpus.size()))];
    EpisodeResult res = run_episode(task, out.params, env, lc, act_rng, fmt::format("train-{}", ep));
    batch.insert(batch.end(), std::make_move_iterator(res.trajectory.begin()),
                 std::make_move_iterator(res.trajectory.end()));
    if (++in_batch == train_cfg.batch_episodes || ep == train_cfg.episodes) {
      if (!batch.empty()) {
        const ppo::PolicyParams snapshot = out.params;
        const ppo::AdamState adam_snapshot = out.adam;
        try {
          last = ppo::ppo_update(out.params, batch, ppo_cfg, out.adam, batch_id).epochs.back();
        } catch (const ppo::NonFiniteLoss&) {
          out.params = snapshot;
          out.adam = adam_snapshot;
          if (train_cfg.curve_csv) write_file(*train_cfg.curve_csv, curve_csv(out.log));
          throw;
        }
      }
      ++batch_id;
      batch.clear();
      in_batch = 0;
    }
    out.log.push_back({ep, res.record.total_reward(), last.policy_loss, last.value_loss, last.entropy,
                       res.record.outcome == Outcome::kVerified});
    if (train_cfg.checkpoint_every > 0 && ep % train_cfg.checkpoint_every == 0) save(ep);
  }
  if (train_cfg.curve_csv) write_file(*train_cfg.curve_csv, curve_csv(out.log));
  return out;
}

double evaluate(const std::vector<task::TaskSpec>& tasks, const ppo::PolicyParams& policy, Environment& env,
                const LoopConfig& cfg, int episodes, std::uint64_t seed, const std::string& tag) {
  if (tasks.empty() || episodes <= 0) return 0.0;
  Rng root(seed);
  Rng task_rng = root.fork(1);
  Rng act_rng = root.fork(2);
  LoopConfig lc = cfg;
  lc.collect_for_training = false;
  int wins = 0;
  for (int i = 0; i < episodes; ++i) {
    const auto& task = tasks[static_cast<std::size_t>(task_rng.below(tasks.size()))];
    if (run_episode(task, policy, env, lc, act_rng, fmt::format("{}-{}", tag, i)).record.outcome ==
        Outcome::kVerified) {
      ++wins;
    }
  }
  return static_cast<double>(wins) / episodes;
}

}  // namespace p2s::loop

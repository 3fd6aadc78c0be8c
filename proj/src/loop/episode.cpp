#include <cmath>

#include "p2s/loop/loop.hpp"
#include "p2s/util/sha256.hpp"

namespace p2s::loop {

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::kRlPolicy: return "RL_POLICY";
    case Mode::kBaselineNoFeedback: return "BASELINE_NO_FEEDBACK";
    case Mode::kBaselineWithFeedback: return "BASELINE_WITH_FEEDBACK";
  }
  return "?";
}

std::string_view to_string(Outcome o) { return o == Outcome::kVerified ? "VERIFIED" : "EXHAUSTED"; }

Mode parse_mode(std::string_view s) {
  for (Mode m : {Mode::kRlPolicy, Mode::kBaselineNoFeedback, Mode::kBaselineWithFeedback}) {
    if (to_string(m) == s) return m;
  }
  throw ConfigError("unknown loop mode '" + std::string(s) + "'");
}

VerifierMode parse_verifier_mode(std::string_view s) {
  if (s == "REAL") return VerifierMode::kReal;
  if (s == "SIMULATED") return VerifierMode::kSimulated;
  throw ConfigError("unknown verifier mode '" + std::string(s) + "' (REAL or SIMULATED)");
}

double EpisodeRecord::total_reward() const {
  double sum = 0.0;
  for (const auto& s : steps) sum += s.reward.value_or(0.0);
  return sum;
}

void LoopConfig::validate() const {
  if (t_max < 1) throw ConfigError("loop.t_max must be >= 1");
  reward.validate();
}

ActionSelector policy_selector(const ppo::PolicyParams& policy, Rng& rng) {
  return [&policy, &rng](const mdp::StateVector& s) {
    const auto dist = ppo::actor_forward(policy, s);
    const auto smp = ppo::sample_action(dist, rng);
    return Choice{smp.action, smp.log_prob, ppo::critic_forward(policy, s)};
  };
}

ActionSelector fixed_selector(int action) {
  return [action](const mdp::StateVector&) { return Choice{action, 0.0, 0.0}; };
}

EpisodeResult run_with_selector(const task::TaskSpec& task, Environment& env, const LoopConfig& cfg,
                                const ActionSelector& select, Mode mode, const std::string& episode_id) {
  EpisodeResult res;
  EpisodeRecord& rec = res.record;
  rec.task_id = task.id;
  rec.episode_id = episode_id;
  rec.mode = mode;

  const gateway::Prompt p0 = task::initial_prompt(task, cfg.tmpl);
  gateway::Prompt p = p0;
  p.meta["episode"] = episode_id;
  p.meta["iteration"] = "0";
  p.meta["last_action"] = "";

  std::optional<int> prev_action;
  // Pending transition for the action sampled at the previous step; its
  // reward comes from this step's verification.
  std::optional<ppo::Transition> pending;

  try {
    for (int t = 0; t < cfg.t_max; ++t) {
      StepRecord step;
      step.prompt_hash = sha256_hex(p.text);
      const gateway::Completion completion = env.gateway.generate(p);
      ++rec.generate_calls;
      const gateway::CandidateSource code = gateway::extract_code(completion);
      const verifier::VerifierReport report = env.verifier.verify(code);
      ++rec.verify_calls;
      rec.iterations_used = t + 1;
      rec.final_source = code;
      step.error_count = report.error_count;
      step.status = report.status;

      const bool verified = report.verified();
      const bool last = t + 1 == cfg.t_max;
      if (pending || (t == 0 && verified)) step.reward = mdp::reward(report, code, cfg.reward);
      if (pending) {
        pending->reward = *step.reward;
        pending->done = verified || last;
        if (cfg.collect_for_training) res.trajectory.push_back(std::move(*pending));
        pending.reset();
      }
      if (verified) {
        rec.steps.push_back(std::move(step));
        rec.outcome = Outcome::kVerified;
        return res;
      }
      if (last && mode != Mode::kRlPolicy) {
        rec.steps.push_back(std::move(step));
        break;
      }

      const mdp::StateVector s = mdp::encode_state(p, code, report, t, prev_action, cfg.t_max);
      const Choice choice = select(s);
      ++rec.actions_sampled;
      step.action = choice.action;
      rec.steps.push_back(std::move(step));
      if (!last) pending = ppo::Transition{s, choice.action, choice.log_prob, 0.0, choice.value, false};

      const mdp::EditAction& action = env.actions.at(choice.action);
      gateway::Prompt next = mdp::compose_prompt(p, action, report, p0);
      next.meta["episode"] = episode_id;
      next.meta["iteration"] = std::to_string(t + 1);
      next.meta["last_action"] = std::string(mdp::to_string(action.name));
      p = std::move(next);
      prev_action = choice.action;
    }
  } catch (const gateway::BackendUnavailable& e) {
    rec.failure = e.what();
  } catch (const gateway::Timeout& e) {
    rec.failure = e.what();
  } catch (const gateway::ReplayMiss& e) {
    rec.failure = e.what();
  } catch (const ToolNotFound& e) {
    rec.failure = e.what();
  }
  rec.outcome = Outcome::kExhausted;
  return res;
}

EpisodeResult run_episode(const task::TaskSpec& task, const ppo::PolicyParams& policy, Environment& env,
                          const LoopConfig& cfg, Rng& rng, const std::string& episode_id) {
  return run_with_selector(task, env, cfg, policy_selector(policy, rng), Mode::kRlPolicy, episode_id);
}

EpisodeRecord run_baseline(const task::TaskSpec& task, Environment& env, bool feedback, const LoopConfig& cfg,
                           const std::string& episode_id) {
  LoopConfig c = cfg;
  c.collect_for_training = false;
  if (!feedback) c.t_max = 1;
  return run_with_selector(task, env, c, fixed_selector(static_cast<int>(mdp::ActionName::kAppendVerifierErrors)),
                           feedback ? Mode::kBaselineWithFeedback : Mode::kBaselineNoFeedback, episode_id)
      .record;
}

}  // namespace p2s::loop

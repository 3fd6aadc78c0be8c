#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "p2s/gateway/gateway.hpp"
#include "p2s/mdp/mdp.hpp"
#include "p2s/ppo/ppo.hpp"
#include "p2s/task/task.hpp"
#include "p2s/verifier/verifier.hpp"

namespace p2s::loop {

enum class Mode { kRlPolicy, kBaselineNoFeedback, kBaselineWithFeedback };
enum class Outcome { kVerified, kExhausted };
enum class VerifierMode { kReal, kSimulated };

std::string_view to_string(Mode m);
std::string_view to_string(Outcome o);
Mode parse_mode(std::string_view s);
VerifierMode parse_verifier_mode(std::string_view s);

struct StepRecord {
  std::string prompt_hash;
  int error_count = 0;
  verifier::Status status = verifier::Status::kFailed;
  /// Edit chosen after this step's verification. On the last step of an
  /// exhausted RL episode it is sampled but never applied.
  std::optional<int> action;
  /// Reward credited to the previous action by this step's outcome, or the
  /// terminal reward of a first-shot success.
  std::optional<double> reward;
};

struct EpisodeRecord {
  std::string task_id;
  std::string episode_id;
  Mode mode = Mode::kRlPolicy;
  std::vector<StepRecord> steps;
  Outcome outcome = Outcome::kExhausted;
  int iterations_used = 0;
  gateway::CandidateSource final_source;
  std::optional<std::string> failure;
  int generate_calls = 0;
  int verify_calls = 0;
  int actions_sampled = 0;

  double total_reward() const;
};

struct LoopConfig {
  int t_max = mdp::kDefaultTMax;
  task::PromptTemplate tmpl = task::PromptTemplate::builtin(task::TemplateMode::kOnelineAndDetailed);
  VerifierMode verifier_mode = VerifierMode::kSimulated;
  bool collect_for_training = false;
  mdp::RewardConfig reward;

  void validate() const;
};

/// Collaborators shared by every episode. All three are thread-safe.
struct Environment {
  gateway::Gateway& gateway;
  verifier::Verifier& verifier;
  const mdp::ActionCatalog& actions;
};

struct Choice {
  int action = 0;
  double log_prob = 0.0;
  double value = 0.0;
};
using ActionSelector = std::function<Choice(const mdp::StateVector&)>;

/// Samples from the actor; value from the critic.
ActionSelector policy_selector(const ppo::PolicyParams& policy, Rng& rng);
/// Always the same action, log-prob 0.
ActionSelector fixed_selector(int action);

struct EpisodeResult {
  EpisodeRecord record;
  std::vector<ppo::Transition> trajectory;
};

/// Algorithm loop with an arbitrary edit selector. `episode_id` keys any
/// per-episode backend state.
EpisodeResult run_with_selector(const task::TaskSpec& task, Environment& env, const LoopConfig& cfg,
                                const ActionSelector& select, Mode mode, const std::string& episode_id);

EpisodeResult run_episode(const task::TaskSpec& task, const ppo::PolicyParams& policy, Environment& env,
                          const LoopConfig& cfg, Rng& rng, const std::string& episode_id);

EpisodeRecord run_baseline(const task::TaskSpec& task, Environment& env, bool feedback, const LoopConfig& cfg,
                           const std::string& episode_id);

struct CurveRow {
  std::int64_t episode = 0;
  double reward = 0.0;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  bool success = false;
};

std::string curve_csv_header();
std::string curve_csv_row(const CurveRow& r);
std::string curve_csv(const std::vector<CurveRow>& rows);
std::vector<CurveRow> parse_curve_csv(const std::string& text);

struct TrainConfig {
  std::int64_t episodes = 0;
  int batch_episodes = 16;
  int checkpoint_every = 100;
  int hidden = 32;
  std::uint64_t seed = 0;
  std::optional<std::filesystem::path> checkpoint_dir;
  std::optional<std::filesystem::path> curve_csv;
};

struct TrainResult {
  ppo::PolicyParams params;
  ppo::AdamState adam;
  std::vector<CurveRow> log;
};

TrainResult train_policy(const std::vector<task::TaskSpec>& corpus, Environment& env, const ppo::PpoConfig& ppo_cfg,
                         const LoopConfig& loop_cfg, const TrainConfig& train_cfg,
                         std::optional<ppo::PolicyParams> initial = std::nullopt);

/// Fraction of `episodes` RL episodes that verify; tasks are drawn
/// uniformly with the given seed.
double evaluate(const std::vector<task::TaskSpec>& tasks, const ppo::PolicyParams& policy, Environment& env,
                const LoopConfig& cfg, int episodes, std::uint64_t seed, const std::string& tag = "eval");

std::string record_to_json(const EpisodeRecord& r);
void append_records(const std::filesystem::path& path, const std::vector<EpisodeRecord>& records);
std::vector<std::string> read_record_lines(const std::filesystem::path& path);

}  // namespace p2s::loop

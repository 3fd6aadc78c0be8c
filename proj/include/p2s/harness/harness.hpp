#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "p2s/gateway/gateway.hpp"
#include "p2s/loop/loop.hpp"
#include "p2s/mdp/mdp.hpp"
#include "p2s/ppo/ppo.hpp"
#include "p2s/synth/synth.hpp"
#include "p2s/transpiler/transpiler.hpp"
#include "p2s/verifier/verifier.hpp"

namespace p2s::harness {

// ---- configuration ----

struct SuiteConfig {
  std::filesystem::path corpus_path;
  loop::Mode mode = loop::Mode::kBaselineWithFeedback;
  std::optional<std::filesystem::path> policy_checkpoint;
  gateway::BackendConfig backend;
  loop::VerifierMode verifier_mode = loop::VerifierMode::kSimulated;
  synth::SynthConfig synth;
  std::filesystem::path output_dir = "runs";
  std::uint64_t seed = 0;

  std::string run_id;  // empty: derived from mode and seed
  int jobs = 1;
  int synth_workers = 2;
  loop::LoopConfig loop;
  std::optional<std::filesystem::path> actions_path;  // default: builtin catalog
  std::optional<std::filesystem::path> sim_rules;     // default: //BUG:k markers
  verifier::DafnyConfig dafny;
  transpiler::CompileConfig compile;
  /// `<task_id>.vectors.json` files for testbenches and array shapes.
  std::optional<std::filesystem::path> vectors_dir;
  transpiler::DirectivePolicy directives;

  void validate() const;
};

/// Everything one TOML file can set. Relative paths resolve against the
/// file's directory.
struct HarnessConfig {
  SuiteConfig suite;
  ppo::PpoConfig ppo;
  loop::TrainConfig train;
  std::optional<std::filesystem::path> eval_corpus;
  int eval_episodes = 100;
};

HarnessConfig load_config(const std::filesystem::path& path);
HarnessConfig parse_config(const std::string& toml_text, const std::filesystem::path& base_dir);

// ---- funnel ----

enum class Stage { kNotVerified, kVerified, kCompiledToHls, kSynthesized };
std::string_view to_string(Stage s);

struct TaskResult {
  std::string task_id;
  Stage stage = Stage::kNotVerified;
  std::string failure_reason;  // empty when the task synthesized
  std::optional<synth::SynthesisReport> synthesis;
};

struct FunnelStats {
  int total_tasks = 0;
  int verified = 0;
  int compiled_to_hls = 0;
  int hls_synthesized = 0;
  double synth_rate_pct = 0.0;
  double avg_elapsed_s = 0.0;
  std::optional<double> avg_peak_memory_mb;
  std::vector<TaskResult> per_task;

  /// Throws std::logic_error when a later stage counts more than an earlier one.
  void check_monotone() const;
};

/// 100 * synthesized / verified, 0 when nothing verified.
double synth_rate_pct(int verified, int synthesized);
/// One decimal, half away from zero.
std::string format_pct(double pct);

FunnelStats aggregate(std::vector<TaskResult> results);
std::string funnel_to_json(const FunnelStats& s);
std::string task_result_to_json(const TaskResult& r);

/// A funnel row as printed in a results table.
struct PublishedFunnelRow {
  std::string model;
  bool feedback = false;
  int verified = 0;
  int compiled = 0;
  int synthesized = 0;
  std::string printed_rate;  // as printed, e.g. "69.1"
};
/// CSV: model,feedback,verified,compiled,synthesized,printed_rate
std::vector<PublishedFunnelRow> load_published_funnel(const std::filesystem::path& path);

// ---- suite ----

class SuiteError : public Error {
 public:
  using Error::Error;
};

struct SuiteOutput {
  FunnelStats stats;
  std::filesystem::path run_dir;
};

/// Episode -> transpile -> synthesize for every task. Per-task failures are
/// recorded; only an unloadable corpus or collaborator setup aborts.
SuiteOutput run_suite(const SuiteConfig& cfg);

/// The environment collaborators a suite or training run builds from config.
struct Collaborators {
  std::unique_ptr<gateway::Gateway> gateway;
  std::unique_ptr<verifier::Verifier> verifier;
  mdp::ActionCatalog actions;

  loop::Environment env() { return {*gateway, *verifier, actions}; }
};
Collaborators make_collaborators(const SuiteConfig& cfg);

// ---- tables ----

class MismatchedTaskSets : public Error {
 public:
  using Error::Error;
};

struct RateGroup {
  std::string model;
  bool feedback = false;
  std::vector<loop::EpisodeRecord> records;
};

struct RateRow {
  std::string model;
  std::optional<double> without_pct;
  std::optional<double> with_pct;
  std::optional<double> delta_without;  // vs the baseline row, same column
  std::optional<double> delta_with;
};

/// 100 * verified / tasks per (model, feedback) group. Every group must cover
/// the same task ids.
std::vector<RateRow> verification_rate_table(const std::vector<RateGroup>& groups,
                                             const std::optional<std::string>& baseline_model = std::nullopt);
std::string rate_table_csv(const std::vector<RateRow>& rows);
/// "+14.0", "-2.0", "0.0"
std::string format_delta(double d);

// ---- curves ----

class SchemaError : public Error {
 public:
  using Error::Error;
};

/// Trailing mean over at most `window` points; same length as the input.
std::vector<double> smooth(const std::vector<double>& xs, std::size_t window = 50);

struct CurveFiles {
  std::filesystem::path reward_svg;
  std::filesystem::path policy_loss_svg;
  std::filesystem::path value_loss_svg;
  std::filesystem::path smoothed_csv;
};

struct SmoothedSeries {
  std::vector<std::int64_t> episode;
  std::vector<double> reward;
  std::vector<double> policy_loss;
  std::vector<double> value_loss;  // scaled when requested
};

SmoothedSeries smoothed_series(const std::vector<loop::CurveRow>& rows, bool scale_value_loss, std::size_t window = 50);

/// Reads a training-curve CSV and writes three SVG plots plus a smoothed CSV.
CurveFiles render_training_curves(const std::filesystem::path& csv_log, const std::filesystem::path& out_dir,
                                  bool scale_value_loss = false);

}  // namespace p2s::harness

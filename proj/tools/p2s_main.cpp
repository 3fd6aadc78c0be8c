#include <fmt/format.h>

#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "p2s/harness/harness.hpp"
#include "p2s/util/text.hpp"

namespace fs = std::filesystem;
using namespace p2s;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kSuiteFailure = 2;

void print_funnel(const harness::FunnelStats& s) {
  fmt::print("tasks {}  verified {}  compiled_to_hls {}  synthesized {} ({}%)\n", s.total_tasks, s.verified,
             s.compiled_to_hls, s.hls_synthesized, harness::format_pct(s.synth_rate_pct));
  for (const auto& t : s.per_task) {
    fmt::print("  {:<8} {:<16} {}\n", t.task_id, harness::to_string(t.stage), t.failure_reason);
  }
}

int cmd_run(const fs::path& config, std::optional<int> jobs, std::optional<std::uint64_t> seed,
            std::optional<std::string> run_id, std::optional<loop::Mode> mode) {
  harness::HarnessConfig h = harness::load_config(config);
  if (jobs) h.suite.jobs = *jobs;
  if (seed) h.suite.seed = *seed;
  if (run_id) h.suite.run_id = *run_id;
  if (mode) h.suite.mode = *mode;
  h.suite.validate();
  const harness::SuiteOutput out = harness::run_suite(h.suite);
  print_funnel(out.stats);
  fmt::print("run directory: {}\n", out.run_dir.string());
  return kOk;
}

int cmd_train(const fs::path& config, std::optional<std::int64_t> episodes, std::optional<std::uint64_t> seed,
              std::optional<fs::path> curve_csv, std::optional<fs::path> ckpt_dir) {
  harness::HarnessConfig h = harness::load_config(config);
  if (episodes) h.train.episodes = *episodes;
  if (seed) {
    h.train.seed = *seed;
    h.suite.seed = *seed;
  }
  if (curve_csv) h.train.curve_csv = *curve_csv;
  if (ckpt_dir) h.train.checkpoint_dir = *ckpt_dir;
  if (h.train.episodes <= 0) throw ConfigError("train.episodes must be positive");
  if (h.suite.corpus_path.empty()) throw ConfigError("suite.corpus is required");
  h.suite.backend.validate();
  h.suite.loop.validate();

  std::vector<task::TaskSpec> corpus;
  try {
    corpus = task::load_corpus(h.suite.corpus_path);
  } catch (const Error& e) {
    throw harness::SuiteError(std::string("corpus load failed: ") + e.what());
  }
  harness::Collaborators collab = harness::make_collaborators(h.suite);
  loop::Environment env = collab.env();
  h.suite.loop.collect_for_training = true;
  const loop::TrainResult res = loop::train_policy(corpus, env, h.ppo, h.suite.loop, h.train);

  int successes = 0;
  for (const auto& r : res.log) successes += r.success ? 1 : 0;
  fmt::print("trained {} episodes; training success rate {}%\n", res.log.size(),
             harness::format_pct(res.log.empty() ? 0.0 : 100.0 * successes / static_cast<double>(res.log.size())));
  if (h.train.curve_csv) {
    fmt::print("curve log: {}\n", h.train.curve_csv->string());
  }

  if (h.eval_corpus) {
    const auto eval_tasks = task::load_corpus(*h.eval_corpus);
    h.suite.loop.collect_for_training = false;
    const double rate = loop::evaluate(eval_tasks, res.params, env, h.suite.loop, h.eval_episodes, h.train.seed + 1);
    fmt::print("eval success over {} episodes: {}%\n", h.eval_episodes, harness::format_pct(100.0 * rate));
  }
  return kOk;
}

int cmd_transpile(const fs::path& dir, const fs::path& out_dir, const std::string& compile_mode,
                  std::optional<fs::path> compiled_dir, std::optional<fs::path> vectors_dir) {
  if (!fs::is_directory(dir)) throw ConfigError(dir.string() + " is not a directory");
  transpiler::CompileConfig cc;
  cc.mode = transpiler::parse_compile_mode(compile_mode);
  if (compiled_dir) cc.fixture_dir = *compiled_dir;

  std::vector<fs::path> inputs;
  for (const auto& e : fs::directory_iterator(dir)) {
    const auto ext = e.path().extension();
    if (e.is_regular_file() && (ext == ".dfy" || ext == ".py")) inputs.push_back(e.path());
  }
  std::sort(inputs.begin(), inputs.end());
  if (inputs.empty()) throw ConfigError("no .dfy or .py files in " + dir.string());

  int failures = 0;
  for (const auto& in : inputs) {
    const std::string stem = in.stem().string();
    try {
      std::string script;
      if (in.extension() == ".py") {
        script = read_file(in);
      } else {
        script = transpiler::compile_to_script(gateway::CandidateSource::from_text(read_file(in)), stem, cc);
      }
      transpiler::TranspileOptions opts;
      if (vectors_dir && fs::exists(*vectors_dir / (stem + ".vectors.json"))) {
        opts.vectors_json = read_file(*vectors_dir / (stem + ".vectors.json"));
      }
      const auto r = transpiler::transpile(script, opts);
      transpiler::write_outputs(r, out_dir / stem);
      fmt::print("{}: ok -> {}\n", in.filename().string(), (out_dir / stem / (r.kernel.name + ".c")).string());
    } catch (const Error& e) {
      ++failures;
      fmt::print("{}: {}\n", in.filename().string(), e.what());
    }
  }
  return failures ? kSuiteFailure : kOk;
}

int cmd_synth(const fs::path& kernel, std::optional<fs::path> tb, std::optional<fs::path> config,
              std::optional<std::string> mode, std::optional<fs::path> mock_table, std::optional<double> clock,
              std::optional<std::string> part, const fs::path& work_dir, bool tcl_only) {
  synth::SynthConfig sc;
  if (config) sc = harness::load_config(*config).suite.synth;
  if (mode) sc.tool_mode = synth::parse_tool_mode(*mode);
  if (mock_table) sc.mock_table = *mock_table;
  if (clock) sc.clock_period_ns = *clock;
  if (part) sc.part = *part;
  if (sc.top_function.empty()) sc.top_function = kernel.stem().string();
  sc.validate();
  if (!fs::exists(kernel)) throw ConfigError("kernel file " + kernel.string() + " not found");
  const fs::path tb_file = tb.value_or(kernel.parent_path() / (kernel.stem().string() + "_tb.c"));
  if (tcl_only) {
    std::cout << synth::render_tcl(sc, fs::absolute(kernel), fs::absolute(tb_file));
    return kOk;
  }
  if (sc.tool_mode == synth::ToolMode::kMock && sc.mock_table.empty()) {
    throw ConfigError("MOCK synthesis needs --mock-table or [synth] mock_table");
  }
  const synth::SynthesisReport r = synth::synthesize(sc, kernel, tb_file, work_dir);
  harness::TaskResult tr;
  tr.task_id = kernel.stem().string();
  tr.synthesis = r;
  std::cout << harness::task_result_to_json(tr);
  return r.status == synth::SynthStatus::kSynthesized ? kOk : kSuiteFailure;
}

int cmd_report(const std::string& run, const fs::path& runs_dir, std::optional<fs::path> curves, bool scale) {
  fs::path run_dir = fs::is_directory(run) ? fs::path(run) : runs_dir / run;
  const fs::path funnel = run_dir / "funnel.json";
  if (!fs::exists(funnel)) throw ConfigError("no funnel.json under " + run_dir.string());
  const auto j = nlohmann::json::parse(read_file(funnel));
  fmt::print("run {}\n", run_dir.string());
  fmt::print("{:<24} {}\n", "total tasks", j.at("total_tasks").get<int>());
  fmt::print("{:<24} {}\n", "verified", j.at("verified").get<int>());
  fmt::print("{:<24} {}\n", "compiled to HLS", j.at("compiled_to_hls").get<int>());
  fmt::print("{:<24} {} ({}%)\n", "HLS synthesized", j.at("hls_synthesized").get<int>(),
             j.at("synth_rate_pct").get<std::string>());
  fmt::print("{:<24} {} s\n", "avg elapsed", format_fixed(j.at("avg_elapsed_s").get<double>(), 2));
  if (!j.at("avg_peak_memory_mb").is_null()) {
    fmt::print("{:<24} {} MB\n", "avg peak memory", format_fixed(j.at("avg_peak_memory_mb").get<double>(), 2));
  }
  if (fs::exists(run_dir / "table2.csv")) fmt::print("\n{}", read_file(run_dir / "table2.csv"));
  if (curves) {
    const auto files = harness::render_training_curves(*curves, run_dir / "curves", scale);
    fmt::print("\ncurves: {} {} {} {}\n", files.reward_svg.string(), files.policy_loss_svg.string(),
               files.value_loss_svg.string(), files.smoothed_csv.string());
  }
  return kOk;
}

int cmd_gradcheck(int seeds, int batch, int hidden, std::uint64_t base_seed) {
  ppo::PpoConfig cfg;
  double worst = 0.0;
  double worst_fault = 1e300;
  for (int s = 0; s < seeds; ++s) {
    Rng rng(base_seed + static_cast<std::uint64_t>(s));
    const auto p = ppo::random_params(mdp::kStateDim, hidden, mdp::kActionCount, rng);
    const auto b = ppo::random_batch(p, batch, rng);
    Rng pick(base_seed * 31 + static_cast<std::uint64_t>(s));
    const double e = ppo::grad_check(p, b, cfg, pick);
    Rng pick2(base_seed * 31 + static_cast<std::uint64_t>(s));
    const double ef = ppo::grad_check(p, b, cfg, pick2, 64, ppo::BackpropFault::kFlipHiddenDerivative);
    fmt::print("seed {}: max relative error {:.3e} (sign-flip mutant {:.3e})\n", base_seed + s, e, ef);
    worst = std::max(worst, e);
    worst_fault = std::min(worst_fault, ef);
  }
  const bool ok = worst < 1e-4 && worst_fault > 1e-2;
  fmt::print("{}: worst {:.3e} < 1e-4, mutant {:.3e} > 1e-2\n", ok ? "PASS" : "FAIL", worst, worst_fault);
  return ok ? kOk : kSuiteFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"p2s: verified code generation to HLS"};
  app.require_subcommand(1);

  fs::path config;
  std::optional<int> jobs;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> run_id;

  auto* run = app.add_subcommand("run", "Full pipeline over a corpus");
  run->add_option("--config", config, "TOML config")->required();
  run->add_option("--jobs", jobs, "Parallel tasks");
  run->add_option("--seed", seed, "Suite seed");
  run->add_option("--run-id", run_id, "Run directory name");

  std::optional<std::int64_t> episodes;
  std::optional<fs::path> curve_csv, ckpt_dir;
  auto* train = app.add_subcommand("train", "Train the prompt-editing policy");
  train->add_option("--config", config, "TOML config")->required();
  train->add_option("--episodes", episodes, "Training episodes");
  train->add_option("--seed", seed, "Seed");
  train->add_option("--curve-csv", curve_csv, "Training-curve CSV output");
  train->add_option("--checkpoint-dir", ckpt_dir, "Checkpoint directory");

  std::string feedback;
  auto* baseline = app.add_subcommand("baseline", "Baseline suite without the policy");
  baseline->add_option("--config", config, "TOML config")->required();
  baseline->add_option("--feedback", feedback, "Verifier feedback")->required()->check(CLI::IsMember({"on", "off"}));
  baseline->add_option("--jobs", jobs, "Parallel tasks");
  baseline->add_option("--seed", seed, "Suite seed");
  baseline->add_option("--run-id", run_id, "Run directory name");

  fs::path tdir, tout = "hls_out";
  std::string compile_mode = "REAL";
  std::optional<fs::path> compiled_dir, vectors_dir;
  auto* transpile = app.add_subcommand("transpile", "Lower verified programs to HLS C");
  transpile->add_option("dir", tdir, "Directory of .dfy (or compiled .py) files")->required();
  transpile->add_option("--out", tout, "Output directory");
  transpile->add_option("--compile-mode", compile_mode, "REAL or FIXTURE");
  transpile->add_option("--compiled-dir", compiled_dir, "FIXTURE: directory of <stem>.py");
  transpile->add_option("--vectors-dir", vectors_dir, "Directory of <stem>.vectors.json");

  fs::path kernel, work_dir = "synth_work";
  std::optional<fs::path> tb, synth_config, mock_table;
  std::optional<std::string> mode, part;
  std::optional<double> clock;
  bool tcl_only = false;
  auto* synth_cmd = app.add_subcommand("synth", "Synthesize one kernel");
  synth_cmd->add_option("kernel", kernel, "Kernel C file")->required();
  synth_cmd->add_option("--tb", tb, "Testbench (default <kernel>_tb.c)");
  synth_cmd->add_option("--config", synth_config, "TOML config ([synth] section)");
  synth_cmd->add_option("--mode", mode, "REAL or MOCK");
  synth_cmd->add_option("--mock-table", mock_table, "mock_reports.toml");
  synth_cmd->add_option("--clock", clock, "Clock period (ns)");
  synth_cmd->add_option("--part", part, "Device part");
  synth_cmd->add_option("--work-dir", work_dir, "Tool working directory");
  synth_cmd->add_flag("--tcl-only", tcl_only, "Print the TCL script and stop");

  std::string report_run;
  fs::path runs_dir = "runs";
  std::optional<fs::path> curves;
  bool scale = false;
  auto* report = app.add_subcommand("report", "Summarize a run");
  report->add_option("run_id", report_run, "Run id or run directory")->required();
  report->add_option("--runs-dir", runs_dir, "Parent of run directories");
  report->add_option("--curves", curves, "Training-curve CSV to plot");
  report->add_flag("--scale-value-loss", scale, "Plot value loss x 1000");

  int gc_seeds = 5, gc_batch = 16, gc_hidden = 8;
  std::uint64_t gc_seed = 1;
  auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference check of the PPO gradients");
  gradcheck->add_option("--seeds", gc_seeds, "Number of seeds");
  gradcheck->add_option("--batch", gc_batch, "Batch size");
  gradcheck->add_option("--hidden", gc_hidden, "Hidden width");
  gradcheck->add_option("--seed", gc_seed, "First seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  try {
    if (*run) return cmd_run(config, jobs, seed, run_id, std::nullopt);
    if (*baseline) {
      const auto m = feedback == "on" ? loop::Mode::kBaselineWithFeedback : loop::Mode::kBaselineNoFeedback;
      return cmd_run(config, jobs, seed, run_id, m);
    }
    if (*train) return cmd_train(config, episodes, seed, curve_csv, ckpt_dir);
    if (*transpile) return cmd_transpile(tdir, tout, compile_mode, compiled_dir, vectors_dir);
    if (*synth_cmd) return cmd_synth(kernel, tb, synth_config, mode, mock_table, clock, part, work_dir, tcl_only);
    if (*report) return cmd_report(report_run, runs_dir, curves, scale);
    if (*gradcheck) return cmd_gradcheck(gc_seeds, gc_batch, gc_hidden, gc_seed);
  } catch (const ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kConfigError;
  } catch (const task::TemplateError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kSuiteFailure;
  }
  return kOk;
}

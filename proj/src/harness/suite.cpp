#include <fmt/format.h>

#include <atomic>
#include <semaphore>
#include <thread>

#include "p2s/harness/harness.hpp"
#include "p2s/util/rng.hpp"
#include "p2s/util/text.hpp"

namespace p2s::harness {

namespace fs = std::filesystem;

Collaborators make_collaborators(const SuiteConfig& cfg) {
  Collaborators c{nullptr, nullptr, cfg.actions_path ? mdp::ActionCatalog::load(*cfg.actions_path)
                                                     : mdp::ActionCatalog::builtin()};
  c.gateway = gateway::make_gateway(cfg.backend);
  if (cfg.verifier_mode == loop::VerifierMode::kReal) {
    c.verifier = std::make_unique<verifier::DafnyVerifier>(cfg.dafny);
  } else {
    c.verifier = std::make_unique<verifier::SimulatedVerifier>(
        cfg.sim_rules ? verifier::SimRuleSet::load(*cfg.sim_rules) : verifier::SimRuleSet::default_bug_markers());
  }
  return c;
}

namespace {

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  for (auto& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

struct TaskContext {
  const SuiteConfig& cfg;
  loop::Environment env;
  const std::optional<ppo::PolicyParams>& policy;
  fs::path run_dir;
  std::counting_semaphore<64>& synth_slots;
};

TaskResult run_task(const task::TaskSpec& task, TaskContext& ctx) {
  const SuiteConfig& cfg = ctx.cfg;
  TaskResult r;
  r.task_id = task.id;
  const std::string episode_id = "suite-" + task.id;

  loop::EpisodeRecord rec;
  if (cfg.mode == loop::Mode::kRlPolicy) {
    Rng rng(Rng::seed_from(cfg.seed, task.id));
    rec = loop::run_episode(task, *ctx.policy, ctx.env, cfg.loop, rng, episode_id).record;
  } else {
    rec = loop::run_baseline(task, ctx.env, cfg.mode == loop::Mode::kBaselineWithFeedback, cfg.loop, episode_id);
  }
  loop::append_records(ctx.run_dir / "episodes" / (task.id + ".jsonl"), {rec});

  if (rec.failure) {
    r.failure_reason = "episode failed: " + *rec.failure;
    return r;
  }
  if (rec.outcome != loop::Outcome::kVerified) {
    const std::string last = rec.steps.empty() ? "none" : std::string(verifier::to_string(rec.steps.back().status));
    r.failure_reason = fmt::format("not verified after {} iteration(s); last status {}", rec.iterations_used, last);
    return r;
  }
  r.stage = Stage::kVerified;

  transpiler::TranspileResult tr;
  try {
    const std::string script = transpiler::compile_to_script(rec.final_source, task.id, cfg.compile);
    transpiler::TranspileOptions opts;
    opts.directives = cfg.directives;
    if (cfg.vectors_dir) {
      const fs::path v = *cfg.vectors_dir / (task.id + ".vectors.json");
      if (fs::exists(v)) opts.vectors_json = read_file(v);
    }
    tr = transpiler::transpile(script, opts);
  } catch (const transpiler::Rejected& e) {
    r.failure_reason = e.what();
    return r;
  } catch (const transpiler::CompileFailed& e) {
    r.failure_reason = std::string("compile failed: ") + e.what();
    return r;
  } catch (const Error& e) {
    r.failure_reason = std::string("transpile failed: ") + e.what();
    return r;
  }
  const fs::path kdir = ctx.run_dir / "kernels" / task.id;
  transpiler::write_outputs(tr, kdir);
  r.stage = Stage::kCompiledToHls;

  synth::SynthConfig sc = cfg.synth;
  sc.top_function = tr.kernel.name;
  ctx.synth_slots.acquire();
  try {
    r.synthesis = synth::synthesize(sc, kdir / (tr.kernel.name + ".c"), kdir / (tr.kernel.name + "_tb.c"),
                                    ctx.run_dir / "synth" / task.id);
  } catch (...) {
    ctx.synth_slots.release();
    throw;
  }
  ctx.synth_slots.release();

  write_file(ctx.run_dir / "reports" / (task.id + ".json"), task_result_to_json(r));
  if (r.synthesis->status == synth::SynthStatus::kSynthesized) {
    r.stage = Stage::kSynthesized;
  } else {
    r.failure_reason = fmt::format("{}: {}", synth::to_string(r.synthesis->status), r.synthesis->failure_detail.value_or(""));
  }
  return r;
}

}  // namespace

SuiteOutput run_suite(const SuiteConfig& cfg) {
  cfg.validate();
  std::vector<task::TaskSpec> corpus;
  try {
    corpus = task::load_corpus(cfg.corpus_path);
  } catch (const Error& e) {
    throw SuiteError(std::string("corpus load failed: ") + e.what());
  }

  std::optional<ppo::PolicyParams> policy;
  if (cfg.mode == loop::Mode::kRlPolicy) policy = ppo::load_checkpoint(*cfg.policy_checkpoint).params;

  Collaborators collab = make_collaborators(cfg);
  const std::string run_id =
      cfg.run_id.empty() ? fmt::format("{}-seed{}", lower_ascii(loop::to_string(cfg.mode)), cfg.seed) : cfg.run_id;
  const fs::path run_dir = cfg.output_dir / run_id;
  // Stale artifacts from an earlier run with the same id.
  for (const char* sub : {"episodes", "kernels", "reports", "synth"}) fs::remove_all(run_dir / sub);
  fs::create_directories(run_dir / "episodes");

  std::counting_semaphore<64> slots(std::min(cfg.synth_workers, 64));
  TaskContext ctx{cfg, collab.env(), policy, run_dir, slots};

  std::vector<TaskResult> results(corpus.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < corpus.size(); i = next++) {
      try {
        results[i] = run_task(corpus[i], ctx);
      } catch (const std::exception& e) {
        TaskResult r;
        r.task_id = corpus[i].id;
        r.failure_reason = std::string("internal error: ") + e.what();
        results[i] = std::move(r);
      }
    }
  };
  const int jobs = std::max(1, std::min<int>(cfg.jobs, static_cast<int>(corpus.size())));
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  SuiteOutput out;
  out.stats = aggregate(std::move(results));
  out.run_dir = run_dir;
  write_file(run_dir / "funnel.json", funnel_to_json(out.stats));

  const std::string model = cfg.backend.model_name.value_or(std::string(gateway::to_string(cfg.backend.kind)));
  const double pct = out.stats.total_tasks ? 100.0 * out.stats.verified / out.stats.total_tasks : 0.0;
  write_file(run_dir / "table2.csv", fmt::format("model,mode,tasks,verified,verified_pct\n{},{},{},{},{}\n", model,
                                                 loop::to_string(cfg.mode), out.stats.total_tasks, out.stats.verified,
                                                 format_pct(pct)));
  return out;
}

}  // namespace p2s::harness

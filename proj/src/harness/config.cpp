#include <fmt/format.h>

#include <set>

#include "p2s/harness/harness.hpp"
#include "p2s/util/text.hpp"
#include "toml.hpp"

namespace p2s::harness {

namespace fs = std::filesystem;

void SuiteConfig::validate() const {
  if (mode == loop::Mode::kRlPolicy && !policy_checkpoint) {
    throw ConfigError("mode RL_POLICY requires suite.policy_checkpoint");
  }
  if (jobs < 1) throw ConfigError("suite.jobs must be >= 1");
  if (synth_workers < 1) throw ConfigError("synth.workers must be >= 1");
  if (corpus_path.empty()) throw ConfigError("suite.corpus is required");
  backend.validate();
  synth.validate();
  loop.validate();
}

namespace {

// Typed reads from one TOML table; leftover keys are an error.
class Section {
 public:
  Section(const toml::table* t, std::string name, fs::path base)
      : t_(t), name_(std::move(name)), base_(std::move(base)) {}

  template <typename T>
  void get(const char* key, T& dst) {
    const toml::node* n = node(key);
    if (!n) return;
    if constexpr (std::is_same_v<T, bool>) {
      auto v = n->value<bool>();
      if (!v) bad(key, "a boolean");
      dst = *v;
    } else if constexpr (std::is_integral_v<T>) {
      auto v = n->value<std::int64_t>();
      if (!v || !n->is_integer()) bad(key, "an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (*v < 0) bad(key, "a non-negative integer");
      }
      dst = static_cast<T>(*v);
    } else if constexpr (std::is_floating_point_v<T>) {
      auto v = n->value<double>();
      if (!v) bad(key, "a number");
      dst = static_cast<T>(*v);
    } else {
      auto v = n->value<std::string>();
      if (!v) bad(key, "a string");
      dst = *v;
    }
  }

  template <typename T>
  void get(const char* key, std::optional<T>& dst) {
    if (!node(key)) return;
    T v{};
    get(key, v);
    dst = v;
  }

  std::optional<std::string> str(const char* key) {
    std::optional<std::string> out;
    get(key, out);
    return out;
  }

  void path(const char* key, fs::path& dst) {
    if (auto s = str(key)) dst = resolve(*s);
  }
  void path(const char* key, std::optional<fs::path>& dst) {
    if (auto s = str(key)) dst = resolve(*s);
  }

  const toml::array* array(const char* key) {
    const toml::node* n = node(key);
    if (!n) return nullptr;
    if (!n->is_array()) bad(key, "an array");
    return n->as_array();
  }

  void finish() const {
    if (!t_) return;
    for (auto&& [k, v] : *t_) {
      if (!seen_.contains(std::string(k.str()))) {
        throw ConfigError(fmt::format("unknown key '{}' in [{}]", k.str(), name_));
      }
    }
  }

 private:
  const toml::node* node(const char* key) {
    seen_.insert(key);
    if (!t_) return nullptr;
    return t_->get(key);
  }

  fs::path resolve(const std::string& s) const {
    fs::path p(s);
    return p.is_absolute() ? p : base_ / p;
  }

  [[noreturn]] void bad(const char* key, const char* what) const {
    throw ConfigError(fmt::format("[{}] {} must be {}", name_, key, what));
  }

  const toml::table* t_;
  std::string name_;
  fs::path base_;
  std::set<std::string> seen_;
};

const std::set<std::string> kSections = {"backend", "reward", "ppo",   "loop",      "synth",
                                         "suite",   "train",  "verifier", "transpile", "directives"};

}  // namespace

HarnessConfig parse_config(const std::string& toml_text, const fs::path& base_dir) {
  toml::table doc;
  try {
    doc = toml::parse(toml_text);
  } catch (const toml::parse_error& e) {
    throw ConfigError(fmt::format("config parse error at line {}: {}", e.source().begin.line, e.description()));
  }
  for (auto&& [k, v] : doc) {
    if (!kSections.contains(std::string(k.str()))) throw ConfigError("unknown config section [" + std::string(k.str()) + "]");
    if (!v.is_table()) throw ConfigError("config key '" + std::string(k.str()) + "' must be a section");
  }
  auto section = [&](const char* name) { return Section(doc[name].as_table(), name, base_dir); };

  HarnessConfig h;
  SuiteConfig& s = h.suite;

  {
    Section b = section("backend");
    if (auto kind = b.str("kind")) s.backend.kind = gateway::parse_backend_kind(*kind);
    b.get("endpoint", s.backend.endpoint);
    b.get("model_name", s.backend.model_name);
    b.get("max_tokens", s.backend.max_tokens);
    b.get("temperature", s.backend.temperature);
    b.get("timeout_s", s.backend.timeout_s);
    b.get("max_retries", s.backend.max_retries);
    b.get("backoff_ms", s.backend.backoff_ms);
    b.get("max_in_flight", s.backend.max_in_flight);
    b.path("script", s.backend.script_path);
    b.path("replay_dir", s.backend.replay_dir);
    b.finish();
  }
  {
    Section r = section("reward");
    mdp::RewardConfig& rc = s.loop.reward;
    r.get("r_succ", rc.r_succ);
    r.get("alpha", rc.alpha);
    r.get("beta", rc.beta);
    r.get("empty_penalty", rc.empty_penalty);
    r.get("gamma", rc.gamma);
    r.finish();
    rc.validate();
  }
  {
    Section p = section("ppo");
    ppo::PpoConfig& c = h.ppo;
    p.get("clip_epsilon", c.clip_epsilon);
    p.get("gamma", c.gamma);
    p.get("lr", c.lr);
    p.get("adam_beta1", c.adam_beta1);
    p.get("adam_beta2", c.adam_beta2);
    p.get("adam_eps", c.adam_eps);
    p.get("grad_clip_norm", c.grad_clip_norm);
    p.get("epochs_per_batch", c.epochs_per_batch);
    p.get("entropy_coef", c.entropy_coef);
    p.get("value_coef", c.value_coef);
    p.get("advantage_norm", c.advantage_norm);
    p.get("seed", c.seed);
    p.finish();
    c.validate();
  }
  {
    Section l = section("loop");
    l.get("t_max", s.loop.t_max);
    auto mode = task::TemplateMode::kOnelineAndDetailed;
    if (auto m = l.str("template_mode")) mode = task::parse_template_mode(*m);
    std::optional<fs::path> tmpl;
    l.path("template", tmpl);
    s.loop.tmpl = tmpl ? task::PromptTemplate::from_file(*tmpl, mode) : task::PromptTemplate::builtin(mode);
    l.path("actions", s.actions_path);
    l.finish();
  }
  {
    Section v = section("verifier");
    if (auto m = v.str("mode")) s.verifier_mode = loop::parse_verifier_mode(*m);
    s.loop.verifier_mode = s.verifier_mode;
    v.path("sim_rules", s.sim_rules);
    v.get("dafny_binary", s.dafny.binary);
    v.get("timeout_s", s.dafny.timeout_s);
    v.get("grace_s", s.dafny.grace_s);
    v.finish();
  }
  {
    Section y = section("synth");
    y.get("part", s.synth.part);
    y.get("clock_period_ns", s.synth.clock_period_ns);
    y.get("top_function", s.synth.top_function);
    if (auto m = y.str("tool_mode")) s.synth.tool_mode = synth::parse_tool_mode(*m);
    y.get("tool_timeout_s", s.synth.tool_timeout_s);
    y.path("mock_table", s.synth.mock_table);
    y.get("workers", s.synth_workers);
    y.finish();
    s.synth.validate();
  }
  {
    Section t = section("transpile");
    if (auto m = t.str("compile_mode")) s.compile.mode = transpiler::parse_compile_mode(*m);
    t.get("dafny_binary", s.compile.dafny_binary);
    t.get("timeout_s", s.compile.timeout_s);
    t.path("compiled_dir", s.compile.fixture_dir);
    t.path("vectors_dir", s.vectors_dir);
    t.finish();
  }
  {
    Section d = section("directives");
    d.get("defaults", s.directives.defaults);
    d.get("max_unroll_trip", s.directives.max_unroll_trip);
    d.get("pipeline_ii", s.directives.pipeline_ii);
    if (const toml::array* overrides = d.array("override")) {
      for (const auto& node : *overrides) {
        const toml::table* ot = node.as_table();
        if (!ot) throw ConfigError("[[directives.override]] entries must be tables");
        Section o(ot, "directives.override", base_dir);
        transpiler::Directive dir;
        auto kind = o.str("kind");
        auto target = o.str("target");
        if (!kind || !target) throw ConfigError("directive override needs kind and target");
        dir.kind = transpiler::parse_directive_kind(*kind);
        dir.target = *target;
        o.get("ii", dir.ii);
        o.get("factor", dir.factor);
        o.get("dim", dir.dim);
        if (auto st = o.str("style")) dir.style = transpiler::parse_partition_style(*st);
        o.finish();
        if (dir.ii < 1 || dir.factor < 1 || dir.dim < 1) {
          throw ConfigError("directive override for '" + dir.target + "': ii, factor and dim must be >= 1");
        }
        s.directives.overrides.push_back(dir);
      }
    }
    d.finish();
    if (s.directives.max_unroll_trip < 0 || s.directives.pipeline_ii < 1) {
      throw ConfigError("directives.max_unroll_trip must be >= 0 and pipeline_ii >= 1");
    }
  }
  {
    Section u = section("suite");
    u.path("corpus", s.corpus_path);
    if (auto m = u.str("mode")) s.mode = loop::parse_mode(*m);
    u.path("policy_checkpoint", s.policy_checkpoint);
    u.path("output_dir", s.output_dir);
    u.get("seed", s.seed);
    u.get("run_id", s.run_id);
    u.get("jobs", s.jobs);
    u.finish();
  }
  {
    Section t = section("train");
    t.get("episodes", h.train.episodes);
    t.get("batch_episodes", h.train.batch_episodes);
    t.get("checkpoint_every", h.train.checkpoint_every);
    t.get("hidden", h.train.hidden);
    h.train.seed = s.seed;
    t.get("seed", h.train.seed);
    t.path("checkpoint_dir", h.train.checkpoint_dir);
    t.path("curve_csv", h.train.curve_csv);
    t.path("eval_corpus", h.eval_corpus);
    t.get("eval_episodes", h.eval_episodes);
    t.finish();
  }
  return h;
}

HarnessConfig load_config(const fs::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::exception& e) {
    throw ConfigError("cannot read config " + path.string() + ": " + e.what());
  }
  return parse_config(text, path.parent_path());
}

}  // namespace p2s::harness

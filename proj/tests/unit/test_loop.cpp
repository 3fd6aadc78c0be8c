#include "doctest.h"
#include "json.hpp"
#include "p2s/gateway/scripted.hpp"
#include "p2s/loop/loop.hpp"
#include "p2s/util/text.hpp"
#include "support.hpp"

using namespace p2s;
using namespace p2s::loop;

namespace {

task::TaskSpec make_task(const std::string& id) {
  task::TaskSpec t;
  t.id = id;
  t.title = id;
  t.description_oneline = "one line for " + id;
  t.description_detailed = "details for " + id;
  t.signature = "method M(x: int) returns (y: int)";
  t.ensures_clauses = {"y == x"};
  return t;
}

struct DecayEnv {
  gateway::ScriptedGateway gateway;
  verifier::SimulatedVerifier verifier{verifier::SimRuleSet::default_bug_markers()};
  mdp::ActionCatalog actions = mdp::ActionCatalog::builtin();

  explicit DecayEnv(std::map<std::string, int> initial) : gateway(script(std::move(initial))) {}
  Environment env() { return {gateway, verifier, actions}; }

  static gateway::ScriptedScript script(std::map<std::string, int> initial) {
    gateway::ScriptedScript s;
    gateway::ErrorDecayScript d;
    d.base_source = "method M(x: int) returns (y: int) { y := x; }";
    d.initial_errors = std::move(initial);
    s.error_decay = d;
    return s;
  }
};

// Counts calls so the loop's bookkeeping can be checked independently.
class CountingGateway final : public gateway::Gateway {
 public:
  explicit CountingGateway(gateway::Gateway& inner) : inner_(inner) {}
  gateway::Completion generate(const gateway::Prompt& p) override {
    ++calls;
    return inner_.generate(p);
  }
  std::string backend_id() const override { return "counting"; }
  int calls = 0;

 private:
  gateway::Gateway& inner_;
};

class CountingVerifier final : public verifier::Verifier {
 public:
  explicit CountingVerifier(verifier::Verifier& inner) : inner_(inner) {}
  verifier::VerifierReport verify(const verifier::CandidateSource& s) override {
    ++calls;
    auto r = inner_.verify(s);
    if (r.verified()) ++verified_reports;
    return r;
  }
  int calls = 0;
  int verified_reports = 0;

 private:
  verifier::Verifier& inner_;
};

}  // namespace

TEST_CASE("episode contract over randomized scripted episodes") {
  Rng rng(2024);
  std::map<std::string, int> initial;
  std::vector<task::TaskSpec> tasks;
  for (int i = 0; i < 12; ++i) {
    const std::string id = "r" + std::to_string(i);
    initial[id] = static_cast<int>(rng.below(6));
    tasks.push_back(make_task(id));
  }
  DecayEnv base(initial);
  LoopConfig cfg;
  for (int ep = 0; ep < 1000; ++ep) {
    CountingGateway g(base.gateway);
    CountingVerifier v(base.verifier);
    Environment env{g, v, base.actions};
    Rng prng(static_cast<std::uint64_t>(ep));
    auto params = ppo::random_params(mdp::kStateDim, 8, mdp::kActionCount, prng, 1.0);
    const auto& task = tasks[rng.below(tasks.size())];
    auto rec = run_episode(task, params, env, cfg, prng, "ep" + std::to_string(ep)).record;
    CHECK(rec.generate_calls == rec.iterations_used);
    CHECK(rec.verify_calls == rec.iterations_used);
    CHECK(g.calls == rec.iterations_used);
    CHECK(v.calls == rec.iterations_used);
    CHECK(rec.iterations_used <= 7);
    CHECK(rec.iterations_used >= 1);
    CHECK(v.verified_reports <= 1);
    CHECK(static_cast<int>(rec.steps.size()) == rec.iterations_used);
    if (rec.outcome == Outcome::kVerified) {
      CHECK(rec.steps.back().status == verifier::Status::kVerified);
      CHECK_FALSE(rec.steps.back().action.has_value());
    } else {
      CHECK(rec.iterations_used == 7);
    }
    for (size_t i = 0; i + 1 < rec.steps.size(); ++i) CHECK(rec.steps[i].status != verifier::Status::kVerified);
  }
}

TEST_CASE("baselines") {
  DecayEnv base({{"a", 2}, {"b", 0}, {"c", 9}});
  auto env = base.env();
  LoopConfig cfg;
  for (const char* id : {"a", "b", "c"}) {
    auto single = run_baseline(make_task(id), env, false, cfg, std::string("nf-") + id);
    CHECK(single.iterations_used == 1);
    CHECK(single.mode == Mode::kBaselineNoFeedback);
  }
  // With feedback every edit is APPEND_VERIFIER_ERRORS, so k bugs need k+1 generations.
  auto a = run_baseline(make_task("a"), env, true, cfg, "wf-a");
  CHECK(a.outcome == Outcome::kVerified);
  CHECK(a.iterations_used == 3);
  auto c = run_baseline(make_task("c"), env, true, cfg, "wf-c");
  CHECK(c.outcome == Outcome::kExhausted);
  CHECK(c.iterations_used == 7);
}

TEST_CASE("rewards are credited to the preceding action") {
  DecayEnv base({{"a", 2}});
  auto env = base.env();
  LoopConfig cfg;
  cfg.collect_for_training = true;
  auto res = run_with_selector(make_task("a"), env, cfg, fixed_selector(0), Mode::kRlPolicy, "x");
  const auto& steps = res.record.steps;
  REQUIRE(steps.size() == 3);
  CHECK_FALSE(steps[0].reward.has_value());
  CHECK(*steps[1].reward == doctest::Approx(-0.7));
  CHECK(*steps[2].reward == 10.0);
  REQUIRE(res.trajectory.size() == 2);
  CHECK(res.trajectory[0].reward == doctest::Approx(-0.7));
  CHECK_FALSE(res.trajectory[0].done);
  CHECK(res.trajectory[1].done);
  CHECK(res.record.total_reward() == doctest::Approx(9.3));

  auto first = run_with_selector(make_task("a"), env, cfg, fixed_selector(11), Mode::kRlPolicy, "y");
  CHECK(first.record.outcome == Outcome::kExhausted);
  CHECK(first.trajectory.size() == 6);
  CHECK(first.trajectory.back().done);
}

TEST_CASE("backend failure ends the episode with a recorded reason") {
  class Down final : public gateway::Gateway {
   public:
    gateway::Completion generate(const gateway::Prompt&) override { throw gateway::BackendUnavailable("down", 4); }
    std::string backend_id() const override { return "down"; }
  } down;
  verifier::SimulatedVerifier v(verifier::SimRuleSet::default_bug_markers());
  auto cat = mdp::ActionCatalog::builtin();
  Environment env{down, v, cat};
  auto rec = run_baseline(make_task("a"), env, true, LoopConfig{}, "f");
  CHECK(rec.outcome == Outcome::kExhausted);
  REQUIRE(rec.failure.has_value());
  CHECK(rec.failure->find("down") != std::string::npos);
}

TEST_CASE("episode records serialize as JSON lines") {
  testing::TempDir tmp;
  DecayEnv base({{"a", 1}});
  auto env = base.env();
  auto rec = run_baseline(make_task("a"), env, true, LoopConfig{}, "j");
  append_records(tmp / "e.jsonl", {rec, rec});
  auto lines = read_record_lines(tmp / "e.jsonl");
  REQUIRE(lines.size() == 2);
  auto j = nlohmann::json::parse(lines[0]);
  CHECK(j["task_id"] == "a");
  CHECK(j["outcome"] == "VERIFIED");
  CHECK(j["steps"].size() == 2);
  CHECK(j["steps"][0]["action"] == "APPEND_VERIFIER_ERRORS");
  CHECK(j["steps"][1]["action"].is_null());
}

TEST_CASE("curve csv round trip") {
  std::vector<CurveRow> rows{{1, -1.5, 0.25, 3.125, 2.48, false}, {2, 10.0, -0.5, 0.0, 2.3, true}};
  auto parsed = parse_curve_csv(curve_csv(rows));
  REQUIRE(parsed.size() == 2);
  CHECK(parsed[1].success);
  CHECK(parsed[0].value_loss == 3.125);
  CHECK_THROWS(parse_curve_csv("bad header\n1,2,3,4,5,0\n"));
  CHECK_THROWS(parse_curve_csv(curve_csv_header() + "\n1,x,3,4,5,0\n"));
}

TEST_CASE("training is deterministic and beats the uniform policy") {
  std::map<std::string, int> initial;
  std::vector<task::TaskSpec> tasks;
  for (int i = 0; i < 9; ++i) {
    initial["c" + std::to_string(i)] = 1 + i % 3;
    tasks.push_back(make_task("c" + std::to_string(i)));
  }
  DecayEnv e1(initial), e2(initial);
  auto env1 = e1.env();
  auto env2 = e2.env();
  TrainConfig tc;
  tc.episodes = 1500;
  tc.seed = 7;
  ppo::PpoConfig pc;
  pc.lr = 3e-3;
  auto r1 = train_policy(tasks, env1, pc, LoopConfig{}, tc);
  auto r2 = train_policy(tasks, env2, pc, LoopConfig{}, tc);
  CHECK(r1.params == r2.params);
  CHECK(curve_csv(r1.log) == curve_csv(r2.log));
  const double trained = evaluate(tasks, r1.params, env1, LoopConfig{}, 100, 99);
  Rng z(0);
  const double uniform =
      evaluate(tasks, ppo::init_params(mdp::kStateDim, 32, mdp::kActionCount, z), env1, LoopConfig{}, 100, 99);
  CHECK(trained > uniform);
  CHECK(trained >= 0.9);
}

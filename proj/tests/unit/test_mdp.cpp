#include <cmath>

#include "doctest.h"
#include "p2s/mdp/mdp.hpp"
#include "p2s/util/rng.hpp"
#include "p2s/util/text.hpp"
#include "support.hpp"

using namespace p2s;
using namespace p2s::mdp;
using verifier::Category;
using verifier::Status;

namespace {

VerifierReport failed(int errors, Category c = Category::kPostcondition) {
  VerifierReport r;
  r.status = Status::kFailed;
  r.error_count = errors;
  for (int i = 0; i < errors; ++i) r.diagnostics.push_back({c, i + 1, 1, "msg " + std::to_string(i)});
  return r;
}

Prompt text_prompt(std::string s) {
  Prompt p;
  p.text = std::move(s);
  return p;
}

}  // namespace

TEST_CASE("reward values") {
  RewardConfig cfg;
  auto code = CandidateSource::from_text("method M() {}");
  CHECK(reward(VerifierReport{}, code, cfg) == 10.0);
  CHECK(std::abs(reward(failed(3), code, cfg) - (-1.1)) < 1e-12);
  CHECK(std::abs(reward(failed(1), code, cfg) - (-0.7)) < 1e-12);
  CHECK(reward(verifier::empty_input_report(), CandidateSource::empty(), cfg) == cfg.empty_penalty);
}

TEST_CASE("reward is strictly decreasing in the error count") {
  RewardConfig cfg;
  auto code = CandidateSource::from_text("x");
  double prev = reward(VerifierReport{}, code, cfg);
  for (int e = 1; e < 50; ++e) {
    double r = reward(failed(e), code, cfg);
    CHECK(r < prev);
    CHECK(r > cfg.empty_penalty - 100);
    prev = r;
  }
  CHECK(reward(failed(1), code, cfg) > cfg.empty_penalty);
}

TEST_CASE("reward config validation") {
  RewardConfig c;
  CHECK_NOTHROW(c.validate());
  c.empty_penalty = -0.1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = RewardConfig{};
  c.gamma = 1.5;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("state encoding stays in range") {
  Rng rng(21);
  for (int i = 0; i < 500; ++i) {
    const int e = static_cast<int>(rng.below(30));
    auto report = failed(e, static_cast<Category>(rng.below(verifier::kCategoryCount)));
    if (e == 0) report = VerifierReport{};
    const int t = static_cast<int>(rng.below(7));
    std::optional<int> prev;
    if (rng.below(2)) prev = static_cast<int>(rng.below(kActionCount));
    auto code = rng.below(5) == 0 ? CandidateSource::empty() : CandidateSource::from_text("x");
    auto s = encode_state(text_prompt(std::string(rng.below(9000), 'a')), code, report, t, prev);
    REQUIRE(s.size() == static_cast<size_t>(kStateDim));
    for (double v : s) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
    CHECK(s[0] == doctest::Approx(t / 7.0));
    CHECK(s[10] == (code.is_empty ? 1.0 : 0.0));
    int hot = 0;
    for (int k = 12; k < 24; ++k) hot += s[static_cast<size_t>(k)] == 1.0;
    CHECK(hot == (prev ? 1 : 0));
  }
}

TEST_CASE("action catalog") {
  auto c = ActionCatalog::builtin();
  CHECK(c.size() == 12);
  for (int i = 0; i < 12; ++i) {
    CHECK(c.at(i).id == i);
    CHECK(parse_action_name(to_string(c.at(i).name)) == c.at(i).name);
  }
  CHECK(c.at(ActionName::kAppendVerifierErrors).snippet.find("Fix every error reported by the verifier") !=
        std::string::npos);
  CHECK_THROWS(c.at(12));
  CHECK_THROWS(parse_action_name("DANCE"));

  testing::TempDir tmp;
  write_file(tmp / "a.toml", "[NO_CHANGE]\nsnippet = \"x\"\n[SIMPLIFY_AND_RETRY]\nsnippet = \"Keep it short.\"\n");
  auto loaded = ActionCatalog::load(tmp / "a.toml");
  CHECK(loaded.at(ActionName::kSimplifyAndRetry).snippet == "Keep it short.");
  write_file(tmp / "b.toml", "[WHATEVER]\nsnippet = \"x\"\n");
  CHECK_THROWS_AS(ActionCatalog::load(tmp / "b.toml"), ConfigError);
}

TEST_CASE("compose: append, idempotence, reset and no-change") {
  auto cat = ActionCatalog::builtin();
  Prompt p0 = text_prompt("initial");
  p0.meta["task_id"] = "t";
  auto rep = failed(7);

  Prompt p1 = compose_prompt(p0, cat.at(ActionName::kAppendVerifierErrors), rep, p0);
  CHECK(p1.text.rfind("initial", 0) == 0);
  CHECK(p1.text.find(std::string(kHintHeader)) != std::string::npos);
  // At most five diagnostics quoted.
  CHECK(p1.text.find("msg 4") != std::string::npos);
  CHECK(p1.text.find("msg 5") == std::string::npos);

  Prompt p2 = compose_prompt(p1, cat.at(ActionName::kAppendVerifierErrors), rep, p0);
  CHECK(p2.text == p1.text);

  CHECK(compose_prompt(p1, cat.at(ActionName::kNoChange), rep, p0).text == p1.text);
  Prompt reset = compose_prompt(p1, cat.at(ActionName::kResetToInitial), rep, p0);
  CHECK(reset.text == p0.text);

  Rng rng(4);
  Prompt p = p0;
  for (int i = 0; i < 200; ++i) {
    const auto& a = cat.at(static_cast<int>(rng.below(kActionCount)));
    Prompt q = compose_prompt(p, a, rep, p0);
    if (a.name != ActionName::kResetToInitial) CHECK(q.text.rfind(p.text, 0) == 0);
    CHECK(compose_prompt(q, a, rep, p0).text == q.text);
    p = q;
  }
}

TEST_CASE("long diagnostic messages are truncated and flattened") {
  VerifierReport r;
  r.status = Status::kFailed;
  r.error_count = 1;
  r.diagnostics.push_back({Category::kOther, std::nullopt, std::nullopt, std::string(1000, 'z') + "\nnext"});
  auto block = hint_block(ActionCatalog::builtin().at(ActionName::kAppendVerifierErrors), r);
  CHECK(block.find(std::string(kMaxQuotedMessage + 1, 'z')) == std::string::npos);
  CHECK(block.find(std::string(kMaxQuotedMessage, 'z')) != std::string::npos);
}

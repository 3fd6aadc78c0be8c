#include "doctest.h"
#include "p2s/task/task.hpp"
#include "p2s/util/rng.hpp"
#include "p2s/util/text.hpp"
#include "support.hpp"

using namespace p2s;
using namespace p2s::task;

namespace {

std::string random_text(Rng& rng, int max_len) {
  static const std::string alphabet = "abcXYZ 0123{}\"\\\n\t:=<>*+-/()[]";
  std::string s;
  const int n = static_cast<int>(rng.below(static_cast<std::uint64_t>(max_len)));
  for (int i = 0; i < n; ++i) s += alphabet[rng.below(alphabet.size())];
  return s;
}

TaskSpec random_task(Rng& rng, int i) {
  TaskSpec t;
  t.id = "g" + std::to_string(i);
  t.title = random_text(rng, 20);
  t.description_oneline = random_text(rng, 40);
  t.description_detailed = random_text(rng, 200);
  t.signature = "method M" + std::to_string(i) + "(x: int) returns (y: int)";
  for (std::uint64_t k = rng.below(3); k > 0; --k) t.requires_clauses.push_back(random_text(rng, 30));
  for (std::uint64_t k = 1 + rng.below(3); k > 0; --k) t.ensures_clauses.push_back(random_text(rng, 30));
  if (rng.below(2) == 0) t.reference_source = random_text(rng, 80);
  return t;
}

}  // namespace

TEST_CASE("serialize then parse is the identity") {
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    TaskSpec t = random_task(rng, i);
    CHECK(parse_task(serialize_task(t), "gen") == t);
  }
}

TEST_CASE("missing or mistyped fields name the task") {
  CHECK_THROWS_AS(parse_task("{}", "x.json"), MalformedTask);
  CHECK_THROWS_AS(parse_task("not json", "x.json"), MalformedTask);
  const std::string no_ensures =
      R"({"id":"a","title":"t","description_oneline":"o","description_detailed":"d","signature":"s",
          "requires":[],"ensures":[]})";
  CHECK_THROWS_AS(parse_task(no_ensures, "a.json"), MalformedTask);
  const std::string bad_type =
      R"({"id":"a","title":"t","description_oneline":"o","description_detailed":"d","signature":7,
          "requires":[],"ensures":["e"]})";
  try {
    parse_task(bad_type, "a.json");
    FAIL("expected MalformedTask");
  } catch (const MalformedTask& e) {
    CHECK(std::string(e.what()).find("signature") != std::string::npos);
  }
}

TEST_CASE("corpus load is sorted and rejects duplicates") {
  testing::TempDir tmp;
  Rng rng(3);
  std::vector<TaskSpec> tasks;
  for (int i : {5, 1, 3}) tasks.push_back(random_task(rng, i));
  save_corpus(tasks, tmp.path());
  auto loaded = load_corpus(tmp.path());
  REQUIRE(loaded.size() == 3);
  CHECK(loaded[0].id == "g1");
  CHECK(loaded[2].id == "g5");

  TaskSpec dup = tasks[0];
  write_file(tmp / "copy.task.json", serialize_task(dup));
  CHECK_THROWS_AS(load_corpus(tmp.path()), DuplicateId);
}

TEST_CASE("fixture corpus loads") {
  auto corpus = load_corpus(testing::data_dir() / "corpus");
  REQUIRE(corpus.size() == 10);
  CHECK(corpus[0].id == "t001");
  CHECK(corpus[0].title == "Cube");
}

TEST_CASE("templates validate placeholders") {
  CHECK_THROWS_AS(PromptTemplate("x", TemplateMode::kOnelineAndDetailed, "{nope}"), TemplateError);
  CHECK_THROWS_AS(PromptTemplate("x", TemplateMode::kOnelineOnly, "{description_detailed}"), TemplateError);
  CHECK_NOTHROW(PromptTemplate("x", TemplateMode::kOnelineOnly, "{description_oneline} {signature} {a-b} {}"));
  CHECK_THROWS_AS(parse_template_mode("BOTH"), TemplateError);
  CHECK(parse_template_mode(to_string(TemplateMode::kOnelineOnly)) == TemplateMode::kOnelineOnly);
}

TEST_CASE("initial prompt is pure and mode-dependent") {
  Rng rng(8);
  for (int i = 0; i < 50; ++i) {
    TaskSpec t = random_task(rng, i);
    t.description_detailed = "DETAILED-MARKER " + t.description_detailed;
    auto full = PromptTemplate::builtin(TemplateMode::kOnelineAndDetailed);
    auto brief = PromptTemplate::builtin(TemplateMode::kOnelineOnly);
    auto p1 = initial_prompt(t, full);
    auto p2 = initial_prompt(t, full);
    CHECK(p1.text == p2.text);
    CHECK(p1.meta == p2.meta);
    CHECK(p1.meta.at("task_id") == t.id);
    CHECK(p1.text.find("DETAILED-MARKER") != std::string::npos);
    CHECK(initial_prompt(t, brief).text.find("DETAILED-MARKER") == std::string::npos);
    CHECK(p1.text.find(t.signature) != std::string::npos);
  }
}

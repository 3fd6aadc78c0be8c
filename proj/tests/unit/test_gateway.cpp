#include <atomic>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "json.hpp"
#include "p2s/gateway/gateway.hpp"
#include "p2s/gateway/remote.hpp"
#include "p2s/gateway/replay.hpp"
#include "p2s/gateway/scripted.hpp"
#include "p2s/util/text.hpp"
#include "support.hpp"

using namespace p2s;
using namespace p2s::gateway;

namespace {

Completion raw(std::string s) {
  Completion c;
  c.raw_text = std::move(s);
  return c;
}

Prompt prompt(std::string text, std::map<std::string, std::string> meta = {}) {
  Prompt p;
  p.text = std::move(text);
  p.meta = std::move(meta);
  return p;
}

}  // namespace

TEST_CASE("extract_code") {
  CHECK(extract_code(raw("```dafny\nmethod M() {}\n```\ntrailing")).text == "method M() {}");
  CHECK(extract_code(raw("prose\n```\nA\n```\n```\nB\n```")).text == "A");
  CHECK(extract_code(raw("  plain text  ")).text == "plain text");
  CHECK(extract_code(raw("```dafny\n   \n```")).is_empty);
  CHECK(extract_code(raw("")).is_empty);
  CHECK(extract_code(raw("```")).is_empty);
  CHECK(extract_code(raw("```dafny\nunterminated")).text == "unterminated");
}

TEST_CASE("extract_code never throws on arbitrary bytes") {
  std::string s;
  for (int i = 0; i < 3000; ++i) {
    s.push_back(static_cast<char>((i * 131 + 7) % 256));
    if (i % 97 == 0) s += "```";
    auto c = extract_code(raw(s));
    CHECK(c.is_empty == is_blank(c.text));
  }
}

TEST_CASE("backend config invariants") {
  BackendConfig c;
  CHECK_THROWS_AS(c.validate(), ConfigError);  // scripted without a script
  c.kind = BackendKind::kRemote;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.endpoint = "http://127.0.0.1:1/v1/chat/completions";
  c.model_name = "m";
  CHECK_NOTHROW(c.validate());
  c.max_tokens = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK_THROWS_AS(parse_backend_kind("LOCAL"), ConfigError);
}

TEST_CASE("scripted rules match in order and respect task filters") {
  ScriptedScript s;
  s.rules.push_back({std::string("t1"), {"fix"}, {}, "A"});
  s.rules.push_back({std::string("t1"), {}, {}, "B"});
  s.rules.push_back({std::nullopt, {"x"}, {"y"}, "C"});
  ScriptedGateway g(s);
  CHECK(g.generate(prompt("please fix", {{"task_id", "t1"}})).raw_text == "A");
  CHECK(g.generate(prompt("hello", {{"task_id", "t1"}})).raw_text == "B");
  CHECK(g.generate(prompt("x", {{"task_id", "t2"}})).raw_text == "C");
  CHECK(g.generate(prompt("x y", {{"task_id", "t2"}})).raw_text.empty());
  CHECK_THROWS_AS(g.generate(prompt("")), std::invalid_argument);
}

TEST_CASE("error decay removes one bug per fix action") {
  ScriptedScript s;
  ErrorDecayScript d;
  d.base_source = "method M() {}";
  d.initial_errors["c1"] = 2;
  s.error_decay = d;
  ScriptedGateway g(s);
  auto gen = [&](int it, const std::string& last) {
    std::map<std::string, std::string> meta{{"task_id", "c1"}, {"episode", "e"}, {"iteration", std::to_string(it)}};
    if (!last.empty()) meta["last_action"] = last;
    return extract_code(g.generate(prompt("p", meta))).text;
  };
  CHECK(gen(0, "").find("//BUG:2") != std::string::npos);
  CHECK(gen(1, "NO_CHANGE").find("//BUG:2") != std::string::npos);
  CHECK(gen(2, "APPEND_VERIFIER_ERRORS").find("//BUG:1") != std::string::npos);
  CHECK(gen(3, "APPEND_VERIFIER_ERRORS") == "method M() {}");
  // A new episode starts over.
  CHECK(gen(0, "").find("//BUG:2") != std::string::npos);
}

TEST_CASE("fixture scripted backend loads") {
  auto s = ScriptedScript::load(testing::data_dir() / "scripted/funnel.json");
  CHECK(s.rules.size() == 13);
  auto d = ScriptedScript::load(testing::data_dir() / "convergence/decay.json");
  REQUIRE(d.error_decay);
  CHECK(d.error_decay->initial_errors.size() == 9);
}

TEST_CASE("replay records and misses by content hash") {
  testing::TempDir tmp;
  CHECK(replay_key("p", "m") == replay_key("p", "m"));
  CHECK(replay_key("p", "m") != replay_key("p", "m2"));
  ReplayGateway::record(tmp.path(), "m", "hello", "```dafny\nX\n```");
  ReplayGateway r(tmp.path(), "m");
  CHECK(r.generate(prompt("hello")).raw_text == "```dafny\nX\n```");
  CHECK_THROWS_AS(r.generate(prompt("other")), ReplayMiss);
  ReplayGateway other_model(tmp.path(), "m2");
  CHECK_THROWS_AS(other_model.generate(prompt("hello")), ReplayMiss);
}

TEST_CASE("recording gateway writes a replayable store") {
  testing::TempDir tmp;
  ScriptedScript s;
  s.rules.push_back({std::nullopt, {}, {}, "EMIT"});
  RecordingGateway rec(std::make_unique<ScriptedGateway>(s), tmp.path(), "m");
  CHECK(rec.generate(prompt("q")).raw_text == "EMIT");
  ReplayGateway r(tmp.path(), "m");
  CHECK(r.generate(prompt("q")).raw_text == "EMIT");
}

TEST_CASE("remote request body shape") {
  BackendConfig c;
  c.kind = BackendKind::kRemote;
  c.model_name = "model-x";
  c.max_tokens = 77;
  c.temperature = 0.5;
  auto body = RemoteGateway::request_body(c, "hi");
  CHECK(body.size() == 4);
  CHECK(body["model"] == "model-x");
  CHECK(body["messages"][0]["role"] == "user");
  CHECK(body["messages"][0]["content"] == "hi");
  CHECK(body["max_tokens"] == 77);
  CHECK(body["temperature"] == 0.5);
}

TEST_CASE("remote gateway retries transient failures against a local server") {
  httplib::Server svr;
  std::atomic<int> calls{0};
  svr.Post("/v1/chat", [&](const httplib::Request& req, httplib::Response& res) {
    const int n = ++calls;
    if (n < 3) {
      res.status = 503;
      return;
    }
    auto in = nlohmann::json::parse(req.body);
    nlohmann::json out = {{"choices", {{{"message", {{"content", "echo:" + in["messages"][0]["content"].get<std::string>()}}},
                                        {"finish_reason", "stop"}}}}};
    res.set_content(out.dump(), "application/json");
  });
  svr.Post("/v1/bad", [&](const httplib::Request&, httplib::Response& res) { res.status = 400; });
  const int port = svr.bind_to_any_port("127.0.0.1");
  std::thread th([&] { svr.listen_after_bind(); });
  svr.wait_until_ready();

  BackendConfig c;
  c.kind = BackendKind::kRemote;
  c.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/v1/chat";
  c.model_name = "m";
  c.backoff_ms = 1;
  c.max_retries = 3;
  RemoteGateway g(c);
  auto done = g.generate(prompt("ping"));
  CHECK(done.raw_text == "echo:ping");
  CHECK(calls.load() == 3);

  c.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/v1/bad";
  RemoteGateway bad(c);
  try {
    bad.generate(prompt("ping"));
    FAIL("expected BackendUnavailable");
  } catch (const BackendUnavailable& e) {
    CHECK(e.attempts() == 1);
  }

  calls = -100;  // keep failing
  c.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/v1/chat";
  c.max_retries = 2;
  RemoteGateway flaky(c);
  try {
    flaky.generate(prompt("ping"));
    FAIL("expected BackendUnavailable");
  } catch (const BackendUnavailable& e) {
    CHECK(e.attempts() == 3);
  }
  svr.stop();
  th.join();
}

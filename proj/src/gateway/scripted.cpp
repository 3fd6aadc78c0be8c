#include "p2s/gateway/scripted.hpp"

#include <stdexcept>

#include "json.hpp"
#include "p2s/util/text.hpp"

namespace p2s::gateway {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<std::string> string_or_list(const json& v) {
  if (v.is_string()) return {v.get<std::string>()};
  return v.get<std::vector<std::string>>();
}

std::string meta_or(const Prompt& p, const char* key, std::string fallback) {
  auto it = p.meta.find(key);
  return it == p.meta.end() ? fallback : it->second;
}

}  // namespace

ScriptedScript ScriptedScript::load(const fs::path& path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ConfigError("bad scripted backend file " + path.string() + ": " + e.what());
  }
  const fs::path base = path.parent_path();
  ScriptedScript s;
  s.backend_id = doc.value("backend_id", "scripted");
  try {
    for (const auto& r : doc.value("rules", json::array())) {
      ScriptRule rule;
      if (r.contains("task")) rule.task = r["task"].get<std::string>();
      if (r.contains("contains")) rule.contains = string_or_list(r["contains"]);
      if (r.contains("not_contains")) rule.not_contains = string_or_list(r["not_contains"]);
      if (r.contains("emit")) {
        rule.emit = r["emit"].get<std::string>();
      } else if (r.contains("emit_file")) {
        rule.emit = read_file(base / r["emit_file"].get<std::string>());
      } else {
        throw ConfigError("scripted rule needs 'emit' or 'emit_file'");
      }
      s.rules.push_back(std::move(rule));
    }
    if (doc.contains("error_decay")) {
      const json& d = doc["error_decay"];
      ErrorDecayScript decay;
      decay.fix_action = d.value("fix_action", decay.fix_action);
      decay.bug_marker = d.value("bug_marker", decay.bug_marker);
      decay.base_source = d.value("base_source", std::string{});
      for (const auto& [task, count] : d.at("initial_errors").items()) {
        decay.initial_errors[task] = count.get<int>();
      }
      s.error_decay = std::move(decay);
    }
  } catch (const json::exception& e) {
    throw ConfigError("bad scripted backend file " + path.string() + ": " + e.what());
  }
  return s;
}

ScriptedGateway::ScriptedGateway(ScriptedScript script) : script_(std::move(script)) {}

Completion ScriptedGateway::generate(const Prompt& prompt) {
  if (prompt.text.empty()) throw std::invalid_argument("prompt text must be non-empty");

  const std::string task = meta_or(prompt, "task_id", "");
  if (script_.error_decay && script_.error_decay->initial_errors.contains(task)) {
    return decay_step(prompt);
  }

  Completion c;
  c.backend_id = script_.backend_id;
  for (const auto& rule : script_.rules) {
    if (rule.task && *rule.task != task) continue;
    bool ok = true;
    for (const auto& needle : rule.contains) ok = ok && prompt.text.find(needle) != std::string::npos;
    for (const auto& needle : rule.not_contains) ok = ok && prompt.text.find(needle) == std::string::npos;
    if (!ok) continue;
    c.raw_text = rule.emit;
    return c;
  }
  // No rule: an empty completion, which the verifier reports as EMPTY_INPUT.
  return c;
}

Completion ScriptedGateway::decay_step(const Prompt& prompt) {
  const ErrorDecayScript& d = *script_.error_decay;
  const std::string task = meta_or(prompt, "task_id", "");
  const std::string key = meta_or(prompt, "episode", task);
  const bool first = meta_or(prompt, "iteration", "0") == "0";
  const bool fixed = meta_or(prompt, "last_action", "") == d.fix_action;

  int bugs;
  {
    std::lock_guard lock(mu_);
    if (first || !remaining_.contains(key)) {
      remaining_[key] = d.initial_errors.at(task);
    } else if (fixed && remaining_[key] > 0) {
      --remaining_[key];
    }
    bugs = remaining_[key];
    if (bugs == 0) remaining_.erase(key);
  }

  Completion c;
  c.backend_id = script_.backend_id;
  std::string source = d.base_source;
  if (bugs > 0) {
    if (!source.empty() && source.back() != '\n') source += '\n';
    source += d.bug_marker + std::to_string(bugs) + "\n";
  }
  c.raw_text = "```dafny\n" + source + "```\n";
  return c;
}

}  // namespace p2s::gateway

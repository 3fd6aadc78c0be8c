#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "p2s/gateway/gateway.hpp"

namespace p2s::gateway {

/// One prompt-matching rule. All present conditions must hold; the first
/// matching rule in script order wins.
struct ScriptRule {
  std::optional<std::string> task;
  std::vector<std::string> contains;
  std::vector<std::string> not_contains;
  std::string emit;
};

/// Stateful repair environment: each task starts with a fixed number of
/// seeded bugs, and one bug disappears on the next generation exactly when
/// the most recently applied edit is `fix_action`. State is keyed by the
/// prompt's "episode" meta entry (falling back to "task_id") and resets
/// whenever "iteration" is "0".
struct ErrorDecayScript {
  std::string fix_action = "APPEND_VERIFIER_ERRORS";
  std::string bug_marker = "//BUG:";
  std::string base_source;
  std::map<std::string, int> initial_errors;
};

struct ScriptedScript {
  std::string backend_id = "scripted";
  std::vector<ScriptRule> rules;
  std::optional<ErrorDecayScript> error_decay;

  static ScriptedScript load(const std::filesystem::path& path);
};

class ScriptedGateway final : public Gateway {
 public:
  explicit ScriptedGateway(ScriptedScript script);

  Completion generate(const Prompt& prompt) override;
  std::string backend_id() const override { return script_.backend_id; }

 private:
  Completion decay_step(const Prompt& prompt);

  ScriptedScript script_;
  std::mutex mu_;
  std::map<std::string, int> remaining_;  // episode key -> live bug count
};

}  // namespace p2s::gateway

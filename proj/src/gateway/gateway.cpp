#include "p2s/gateway/gateway.hpp"

#include "p2s/gateway/remote.hpp"
#include "p2s/gateway/replay.hpp"
#include "p2s/gateway/scripted.hpp"
#include "p2s/util/sha256.hpp"

namespace p2s::gateway {

BackendKind parse_backend_kind(std::string_view name) {
  if (name == "SCRIPTED") return BackendKind::kScripted;
  if (name == "REPLAY") return BackendKind::kReplay;
  if (name == "REMOTE") return BackendKind::kRemote;
  throw ConfigError("unknown backend kind '" + std::string(name) + "'");
}

std::string_view to_string(BackendKind kind) {
  switch (kind) {
    case BackendKind::kScripted: return "SCRIPTED";
    case BackendKind::kReplay: return "REPLAY";
    case BackendKind::kRemote: return "REMOTE";
  }
  return "?";
}

void BackendConfig::validate() const {
  if (max_tokens <= 0) throw ConfigError("backend.max_tokens must be positive");
  if (temperature < 0) throw ConfigError("backend.temperature must be non-negative");
  if (timeout_s <= 0) throw ConfigError("backend.timeout_s must be positive");
  if (max_retries < 0) throw ConfigError("backend.max_retries must be non-negative");
  if (max_in_flight <= 0) throw ConfigError("backend.max_in_flight must be positive");
  if (kind == BackendKind::kRemote && (!endpoint || endpoint->empty() || !model_name || model_name->empty())) {
    throw ConfigError("REMOTE backend requires endpoint and model_name");
  }
  if (kind == BackendKind::kScripted && script_path.empty()) {
    throw ConfigError("SCRIPTED backend requires a script path");
  }
  if (kind == BackendKind::kReplay && replay_dir.empty()) {
    throw ConfigError("REPLAY backend requires replay_dir");
  }
}

std::unique_ptr<Gateway> make_gateway(const BackendConfig& cfg) {
  cfg.validate();
  switch (cfg.kind) {
    case BackendKind::kScripted:
      return std::make_unique<ScriptedGateway>(ScriptedScript::load(cfg.script_path));
    case BackendKind::kReplay:
      return std::make_unique<ReplayGateway>(cfg.replay_dir, cfg.model_name.value_or(""));
    case BackendKind::kRemote:
      return std::make_unique<RemoteGateway>(cfg);
  }
  throw ConfigError("unhandled backend kind");
}

std::string replay_key(const std::string& prompt_text, const std::string& model_name) {
  return sha256_hex(model_name + "\n" + prompt_text);
}

}  // namespace p2s::gateway

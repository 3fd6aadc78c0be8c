#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "p2s/gateway/prompt.hpp"
#include "p2s/util/error.hpp"

namespace p2s::gateway {

enum class BackendKind { kScripted, kReplay, kRemote };

BackendKind parse_backend_kind(std::string_view name);
std::string_view to_string(BackendKind kind);

struct BackendConfig {
  BackendKind kind = BackendKind::kScripted;
  std::optional<std::string> endpoint;
  std::optional<std::string> model_name;
  int max_tokens = 2048;
  double temperature = 0.2;
  int timeout_s = 60;
  int max_retries = 3;
  /// First retry waits this long; each further retry doubles it.
  int backoff_ms = 500;
  int max_in_flight = 4;
  /// SCRIPTED: rule script (JSON). REPLAY: store directory.
  std::filesystem::path script_path;
  std::filesystem::path replay_dir;

  /// Throws ConfigError when the invariants for `kind` do not hold.
  void validate() const;
};

class BackendUnavailable : public Error {
 public:
  BackendUnavailable(std::string detail, int attempts)
      : Error("backend unavailable after " + std::to_string(attempts) + " attempt(s): " + detail),
        attempts_(attempts) {}
  int attempts() const { return attempts_; }

 private:
  int attempts_;
};

class ReplayMiss : public Error {
 public:
  explicit ReplayMiss(std::string hash) : Error("replay miss: " + hash), hash_(std::move(hash)) {}
  const std::string& hash() const { return hash_; }

 private:
  std::string hash_;
};

class Timeout : public Error {
 public:
  using Error::Error;
};

/// The frozen generative model. Implementations are safe to call from
/// several threads at once.
class Gateway {
 public:
  virtual ~Gateway() = default;

  /// Throws std::invalid_argument for an empty prompt.
  virtual Completion generate(const Prompt& prompt) = 0;
  virtual std::string backend_id() const = 0;
};

std::unique_ptr<Gateway> make_gateway(const BackendConfig& cfg);

/// Replay key: SHA-256 over model name, a newline, then the prompt text.
std::string replay_key(const std::string& prompt_text, const std::string& model_name);

/// First fenced block if the completion has fences, else the trimmed text.
/// Never throws; whitespace-only content yields an EMPTY candidate.
CandidateSource extract_code(const Completion& completion);

}  // namespace p2s::gateway

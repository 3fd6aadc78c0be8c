#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "p2s/gateway/gateway.hpp"

namespace p2s::gateway {

/// Content-addressed completion cache: `<dir>/<sha256>.json` holding
/// {"prompt_sha": ..., "completion": ...}.
class ReplayGateway final : public Gateway {
 public:
  ReplayGateway(std::filesystem::path dir, std::string model_name);

  Completion generate(const Prompt& prompt) override;
  std::string backend_id() const override { return "replay:" + model_name_; }

  static void record(const std::filesystem::path& dir, const std::string& model_name,
                     const std::string& prompt_text, const std::string& completion);

 private:
  std::filesystem::path dir_;
  std::string model_name_;
};

/// Passes calls through to `inner` and stores every completion in a replay
/// directory, so a later run can use ReplayGateway offline.
class RecordingGateway final : public Gateway {
 public:
  RecordingGateway(std::unique_ptr<Gateway> inner, std::filesystem::path dir, std::string model_name);

  Completion generate(const Prompt& prompt) override;
  std::string backend_id() const override { return inner_->backend_id(); }

 private:
  std::unique_ptr<Gateway> inner_;
  std::filesystem::path dir_;
  std::string model_name_;
};

}  // namespace p2s::gateway

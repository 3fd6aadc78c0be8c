#pragma once

#include <semaphore>
#include <string>

#include "json.hpp"
#include "p2s/gateway/gateway.hpp"

namespace p2s::gateway {

/// OpenAI-style chat-completions client. The request body is exactly
/// {"model", "messages": [{"role": "user", "content"}], "max_tokens",
/// "temperature"}; the completion is read from choices[0].message.content.
/// P2S_API_KEY, when set, is sent as a bearer token.
class RemoteGateway final : public Gateway {
 public:
  explicit RemoteGateway(BackendConfig cfg);

  Completion generate(const Prompt& prompt) override;
  std::string backend_id() const override { return "remote:" + *cfg_.model_name; }

  static nlohmann::json request_body(const BackendConfig& cfg, const std::string& prompt_text);

 private:
  struct Endpoint {
    std::string scheme_host_port;
    std::string path;
  };
  static Endpoint split_endpoint(const std::string& url);

  BackendConfig cfg_;
  Endpoint endpoint_;
  std::counting_semaphore<> in_flight_;
};

}  // namespace p2s::gateway

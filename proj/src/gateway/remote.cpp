#include "p2s/gateway/remote.hpp"

#include <chrono>
#include <cstdlib>
#include <stdexcept>
#include <thread>

#include "httplib.h"

namespace p2s::gateway {

using nlohmann::json;

namespace {

struct SemaphoreGuard {
  std::counting_semaphore<>& sem;
  explicit SemaphoreGuard(std::counting_semaphore<>& s) : sem(s) { sem.acquire(); }
  ~SemaphoreGuard() { sem.release(); }
};

// Transport errors and 429/5xx are worth retrying; other statuses are not.
bool transient(int status) { return status == 408 || status == 429 || status >= 500; }

}  // namespace

RemoteGateway::RemoteGateway(BackendConfig cfg)
    : cfg_(std::move(cfg)), in_flight_(cfg_.max_in_flight) {
  cfg_.validate();
  endpoint_ = split_endpoint(*cfg_.endpoint);
}

RemoteGateway::Endpoint RemoteGateway::split_endpoint(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("endpoint must be an http(s) URL: " + url);
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

json RemoteGateway::request_body(const BackendConfig& cfg, const std::string& prompt_text) {
  json body = json::object();
  body["model"] = cfg.model_name.value_or("");
  body["messages"] = json::array({json{{"role", "user"}, {"content", prompt_text}}});
  body["max_tokens"] = cfg.max_tokens;
  body["temperature"] = cfg.temperature;
  return body;
}

Completion RemoteGateway::generate(const Prompt& prompt) {
  if (prompt.text.empty()) throw std::invalid_argument("prompt text must be non-empty");
  SemaphoreGuard guard(in_flight_);

  const std::string payload = request_body(cfg_, prompt.text).dump();
  httplib::Headers headers;
  if (const char* key = std::getenv("P2S_API_KEY"); key != nullptr && *key != '\0') {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  std::string last_error;
  bool timed_out = false;
  const int attempts = cfg_.max_retries + 1;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(cfg_.backoff_ms) * (1 << (attempt - 1)));
    }
    httplib::Client client(endpoint_.scheme_host_port);
    client.set_connection_timeout(cfg_.timeout_s, 0);
    client.set_read_timeout(cfg_.timeout_s, 0);
    client.set_write_timeout(cfg_.timeout_s, 0);

    const auto start = std::chrono::steady_clock::now();
    auto res = client.Post(endpoint_.path, headers, payload, "application/json");
    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - start)
                             .count();
    if (!res) {
      timed_out = res.error() == httplib::Error::Read || res.error() == httplib::Error::Write;
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      last_error = "HTTP " + std::to_string(res->status);
      if (transient(res->status)) continue;
      throw BackendUnavailable(last_error, attempt + 1);
    }
    try {
      json doc = json::parse(res->body);
      const json& choice = doc.at("choices").at(0);
      Completion c;
      c.raw_text = choice.at("message").at("content").get<std::string>();
      c.backend_id = backend_id();
      c.latency_ms = elapsed;
      c.truncated = choice.value("finish_reason", "") == "length";
      return c;
    } catch (const json::exception& e) {
      throw BackendUnavailable(std::string("malformed response: ") + e.what(), attempt + 1);
    }
  }
  if (timed_out) throw Timeout("remote backend timed out after " + std::to_string(attempts) + " attempt(s)");
  throw BackendUnavailable(last_error, attempts);
}

}  // namespace p2s::gateway

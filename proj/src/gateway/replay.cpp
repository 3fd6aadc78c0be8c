#include "p2s/gateway/replay.hpp"

#include <chrono>
#include <stdexcept>

#include "json.hpp"
#include "p2s/util/text.hpp"

namespace p2s::gateway {

namespace fs = std::filesystem;
using nlohmann::json;

ReplayGateway::ReplayGateway(fs::path dir, std::string model_name)
    : dir_(std::move(dir)), model_name_(std::move(model_name)) {}

Completion ReplayGateway::generate(const Prompt& prompt) {
  if (prompt.text.empty()) throw std::invalid_argument("prompt text must be non-empty");
  const std::string key = replay_key(prompt.text, model_name_);
  const fs::path file = dir_ / (key + ".json");
  if (!fs::exists(file)) throw ReplayMiss(key);
  json doc;
  try {
    doc = json::parse(read_file(file));
  } catch (const json::exception& e) {
    throw Error("corrupt replay entry " + file.string() + ": " + e.what());
  }
  if (doc.value("prompt_sha", "") != key) throw Error("replay entry key mismatch in " + file.string());
  Completion c;
  c.raw_text = doc.at("completion").get<std::string>();
  c.backend_id = backend_id();
  return c;
}

void ReplayGateway::record(const fs::path& dir, const std::string& model_name,
                           const std::string& prompt_text, const std::string& completion) {
  const std::string key = replay_key(prompt_text, model_name);
  json doc = {{"prompt_sha", key}, {"completion", completion}};
  write_file(dir / (key + ".json"), doc.dump(2) + "\n");
}

RecordingGateway::RecordingGateway(std::unique_ptr<Gateway> inner, fs::path dir, std::string model_name)
    : inner_(std::move(inner)), dir_(std::move(dir)), model_name_(std::move(model_name)) {}

Completion RecordingGateway::generate(const Prompt& prompt) {
  Completion c = inner_->generate(prompt);
  ReplayGateway::record(dir_, model_name_, prompt.text, c.raw_text);
  return c;
}

}  // namespace p2s::gateway

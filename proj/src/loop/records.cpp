#include <fstream>

#include "json.hpp"
#include "p2s/loop/loop.hpp"
#include "p2s/util/text.hpp"

namespace p2s::loop {

using nlohmann::json;

std::string record_to_json(const EpisodeRecord& r) {
  json steps = json::array();
  for (const auto& s : r.steps) {
    json j{{"prompt_hash", s.prompt_hash},
           {"error_count", s.error_count},
           {"status", verifier::to_string(s.status)},
           {"action", s.action ? json(mdp::to_string(static_cast<mdp::ActionName>(*s.action))) : json(nullptr)},
           {"reward", s.reward ? json(*s.reward) : json(nullptr)}};
    steps.push_back(std::move(j));
  }
  json doc{{"task_id", r.task_id},
           {"episode_id", r.episode_id},
           {"mode", to_string(r.mode)},
           {"outcome", to_string(r.outcome)},
           {"iterations_used", r.iterations_used},
           {"steps", std::move(steps)},
           {"final_source", r.final_source.text},
           {"failure", r.failure ? json(*r.failure) : json(nullptr)}};
  return doc.dump();
}

void append_records(const std::filesystem::path& path, const std::vector<EpisodeRecord>& records) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::app | std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for append");
  for (const auto& r : records) out << record_to_json(r) << '\n';
  if (!out) throw Error("write failed: " + path.string());
}

std::vector<std::string> read_record_lines(const std::filesystem::path& path) {
  std::vector<std::string> lines;
  for (auto& l : split_lines(read_file(path))) {
    if (!is_blank(l)) lines.push_back(std::move(l));
  }
  return lines;
}

}  // namespace p2s::loop

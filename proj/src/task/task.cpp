#include "p2s/task/task.hpp"

#include <algorithm>
#include <set>

#include "json.hpp"
#include "p2s/util/text.hpp"

namespace p2s::task {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string require_string(const json& doc, const char* key, const std::string& origin) {
  auto it = doc.find(key);
  if (it == doc.end()) throw MalformedTask(origin, std::string("missing field '") + key + "'");
  if (!it->is_string()) throw MalformedTask(origin, std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

std::vector<std::string> require_string_list(const json& doc, const char* key,
                                             const std::string& origin) {
  auto it = doc.find(key);
  if (it == doc.end()) throw MalformedTask(origin, std::string("missing field '") + key + "'");
  if (!it->is_array()) throw MalformedTask(origin, std::string("field '") + key + "' must be a list");
  std::vector<std::string> out;
  for (const auto& item : *it) {
    if (!item.is_string()) {
      throw MalformedTask(origin, std::string("field '") + key + "' must contain only strings");
    }
    out.push_back(item.get<std::string>());
  }
  return out;
}

}  // namespace

TaskSpec parse_task(const std::string& json_text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw MalformedTask(origin, std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw MalformedTask(origin, "top level must be an object");

  TaskSpec t;
  t.id = require_string(doc, "id", origin);
  if (t.id.empty()) throw MalformedTask(origin, "empty id");
  t.title = require_string(doc, "title", origin);
  t.description_oneline = require_string(doc, "description_oneline", origin);
  t.description_detailed = require_string(doc, "description_detailed", origin);
  t.signature = require_string(doc, "signature", origin);
  t.requires_clauses = require_string_list(doc, "requires", origin);
  t.ensures_clauses = require_string_list(doc, "ensures", origin);
  if (t.ensures_clauses.empty()) throw MalformedTask(origin, "ensures must be non-empty");

  auto ref = doc.find("reference_source");
  if (ref != doc.end() && !ref->is_null()) {
    if (!ref->is_string()) throw MalformedTask(origin, "reference_source must be a string or null");
    t.reference_source = ref->get<std::string>();
  }
  return t;
}

std::string serialize_task(const TaskSpec& t) {
  json doc = json::object();
  doc["id"] = t.id;
  doc["title"] = t.title;
  doc["description_oneline"] = t.description_oneline;
  doc["description_detailed"] = t.description_detailed;
  doc["signature"] = t.signature;
  doc["requires"] = t.requires_clauses;
  doc["ensures"] = t.ensures_clauses;
  doc["reference_source"] = t.reference_source ? json(*t.reference_source) : json(nullptr);
  return doc.dump(2) + "\n";
}

std::vector<TaskSpec> load_corpus(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error("corpus directory not found: " + dir.string());

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && name.size() > 10 &&
        name.compare(name.size() - 10, 10, ".task.json") == 0) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());

  std::vector<TaskSpec> tasks;
  std::set<std::string> seen;
  for (const auto& f : files) {
    TaskSpec t = parse_task(read_file(f), f.filename().string());
    if (!seen.insert(t.id).second) throw DuplicateId(t.id);
    tasks.push_back(std::move(t));
  }
  std::sort(tasks.begin(), tasks.end(),
            [](const TaskSpec& a, const TaskSpec& b) { return a.id < b.id; });
  return tasks;
}

void save_corpus(const std::vector<TaskSpec>& tasks, const fs::path& dir) {
  fs::create_directories(dir);
  for (const auto& t : tasks) write_file(dir / (t.id + ".task.json"), serialize_task(t));
}

}  // namespace p2s::task

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "p2s/gateway/prompt.hpp"
#include "p2s/util/error.hpp"

namespace p2s::task {

/// One benchmark task: natural-language description, formal contract and
/// the target signature.
struct TaskSpec {
  std::string id;
  std::string title;
  std::string description_oneline;
  std::string description_detailed;
  std::string signature;
  std::vector<std::string> requires_clauses;
  std::vector<std::string> ensures_clauses;
  std::optional<std::string> reference_source;

  friend bool operator==(const TaskSpec&, const TaskSpec&) = default;
};

class MalformedTask : public Error {
 public:
  MalformedTask(std::string id, std::string reason)
      : Error("malformed task '" + id + "': " + reason),
        id_(std::move(id)),
        reason_(std::move(reason)) {}
  const std::string& id() const { return id_; }
  const std::string& reason() const { return reason_; }

 private:
  std::string id_;
  std::string reason_;
};

class DuplicateId : public Error {
 public:
  explicit DuplicateId(std::string id) : Error("duplicate task id '" + id + "'"), id_(std::move(id)) {}
  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

/// Parses one task document. `origin` names the file in error messages.
TaskSpec parse_task(const std::string& json_text, const std::string& origin);
std::string serialize_task(const TaskSpec& task);

/// Loads every `*.task.json` under `dir`, sorted by id.
std::vector<TaskSpec> load_corpus(const std::filesystem::path& dir);
/// Writes one `<id>.task.json` per task.
void save_corpus(const std::vector<TaskSpec>& tasks, const std::filesystem::path& dir);

enum class TemplateMode { kOnelineAndDetailed, kOnelineOnly };

class TemplateError : public Error {
 public:
  using Error::Error;
};

/// Prompt template with `{placeholder}` slots. Construction validates the
/// body: every placeholder must be known, and a ONELINE_ONLY template may not
/// reference the detailed description.
class PromptTemplate {
 public:
  PromptTemplate(std::string template_id, TemplateMode mode, std::string body);

  static PromptTemplate builtin(TemplateMode mode);
  static PromptTemplate from_file(const std::filesystem::path& path, TemplateMode mode);

  const std::string& id() const { return id_; }
  TemplateMode mode() const { return mode_; }
  const std::string& body() const { return body_; }

  std::string render(const TaskSpec& task) const;

 private:
  std::string id_;
  TemplateMode mode_;
  std::string body_;
};

TemplateMode parse_template_mode(std::string_view name);
std::string_view to_string(TemplateMode mode);

/// p_0 for a task. Pure: identical inputs give byte-identical text.
gateway::Prompt initial_prompt(const TaskSpec& task, const PromptTemplate& tmpl);

}  // namespace p2s::task

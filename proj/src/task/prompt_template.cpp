#include <set>

#include "p2s/task/task.hpp"
#include "p2s/util/text.hpp"

namespace p2s::task {

namespace {

const std::set<std::string, std::less<>> kPlaceholders = {
    "description_oneline", "description_detailed", "signature", "requires", "ensures"};

constexpr std::string_view kOnelineAndDetailedBody =
    R"(You are an expert Dafny programmer. Write a complete Dafny program for the task below. The program must pass the Dafny verifier with no errors.

Task: {description_oneline}

Details:
{description_detailed}

Implement exactly this signature:
{signature}

Contract to satisfy:
{requires}
{ensures}

Include every loop invariant, assertion and decreases clause the verifier needs. Reply with the Dafny code in a single ```dafny fenced block.)";

constexpr std::string_view kOnelineOnlyBody =
    R"(You are an expert Dafny programmer. Write a complete Dafny program for the task below. The program must pass the Dafny verifier with no errors.

Task: {description_oneline}

Implement exactly this signature:
{signature}

Contract to satisfy:
{requires}
{ensures}

Include every loop invariant, assertion and decreases clause the verifier needs. Reply with the Dafny code in a single ```dafny fenced block.)";

// Yields each {name} occurrence; `visit` returns the replacement text.
template <typename Visit>
std::string expand(std::string_view body, Visit&& visit) {
  std::string out;
  size_t pos = 0;
  while (pos < body.size()) {
    size_t open = body.find('{', pos);
    if (open == std::string_view::npos) {
      out.append(body.substr(pos));
      break;
    }
    size_t close = body.find('}', open + 1);
    std::string_view name =
        close == std::string_view::npos ? std::string_view{} : body.substr(open + 1, close - open - 1);
    bool ident = !name.empty() && name.find_first_not_of("abcdefghijklmnopqrstuvwxyz_") ==
                                      std::string_view::npos;
    if (!ident) {
      out.append(body.substr(pos, open + 1 - pos));
      pos = open + 1;
      continue;
    }
    out.append(body.substr(pos, open - pos));
    out.append(visit(name));
    pos = close + 1;
  }
  return out;
}

std::string clause_lines(const char* keyword, const std::vector<std::string>& clauses) {
  if (clauses.empty()) return std::string("(no ") + keyword + " clauses)";
  std::vector<std::string> lines;
  for (const auto& c : clauses) lines.push_back(std::string(keyword) + " " + c);
  return join(lines, "\n");
}

}  // namespace

TemplateMode parse_template_mode(std::string_view name) {
  if (name == "ONELINE_AND_DETAILED") return TemplateMode::kOnelineAndDetailed;
  if (name == "ONELINE_ONLY") return TemplateMode::kOnelineOnly;
  throw TemplateError("unknown template mode '" + std::string(name) + "'");
}

std::string_view to_string(TemplateMode mode) {
  return mode == TemplateMode::kOnelineAndDetailed ? "ONELINE_AND_DETAILED" : "ONELINE_ONLY";
}

PromptTemplate::PromptTemplate(std::string template_id, TemplateMode mode, std::string body)
    : id_(std::move(template_id)), mode_(mode), body_(std::move(body)) {
  expand(body_, [&](std::string_view name) -> std::string {
    if (!kPlaceholders.contains(name)) {
      throw TemplateError("template '" + id_ + "': unresolved placeholder {" + std::string(name) + "}");
    }
    if (mode_ == TemplateMode::kOnelineOnly && name == "description_detailed") {
      throw TemplateError("template '" + id_ +
                          "': ONELINE_ONLY template references {description_detailed}");
    }
    return {};
  });
}

PromptTemplate PromptTemplate::builtin(TemplateMode mode) {
  if (mode == TemplateMode::kOnelineAndDetailed) {
    return PromptTemplate("oneline_and_detailed", mode, std::string(kOnelineAndDetailedBody));
  }
  return PromptTemplate("oneline_only", mode, std::string(kOnelineOnlyBody));
}

PromptTemplate PromptTemplate::from_file(const std::filesystem::path& path, TemplateMode mode) {
  return PromptTemplate(path.stem().string(), mode, read_file(path));
}

std::string PromptTemplate::render(const TaskSpec& task) const {
  return expand(body_, [&](std::string_view name) -> std::string {
    if (name == "description_oneline") return task.description_oneline;
    if (name == "description_detailed") return task.description_detailed;
    if (name == "signature") return task.signature;
    if (name == "requires") return clause_lines("requires", task.requires_clauses);
    return clause_lines("ensures", task.ensures_clauses);
  });
}

gateway::Prompt initial_prompt(const TaskSpec& task, const PromptTemplate& tmpl) {
  gateway::Prompt p;
  p.text = tmpl.render(task);
  p.meta["task_id"] = task.id;
  p.meta["template_id"] = tmpl.id();
  return p;
}

}  // namespace p2s::task

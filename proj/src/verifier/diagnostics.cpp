#include <algorithm>
#include <cctype>
#include <regex>

#include "p2s/util/text.hpp"
#include "p2s/verifier/verifier.hpp"

namespace p2s::verifier {

std::string_view to_string(Category c) {
  switch (c) {
    case Category::kPostcondition: return "POSTCONDITION";
    case Category::kPrecondition: return "PRECONDITION";
    case Category::kInvariant: return "INVARIANT";
    case Category::kTermination: return "TERMINATION";
    case Category::kAssertion: return "ASSERTION";
    case Category::kParseOrType: return "PARSE_OR_TYPE";
    case Category::kTimeout: return "TIMEOUT";
    case Category::kOther: return "OTHER";
  }
  return "OTHER";
}

Category parse_category(std::string_view name) {
  for (int i = 0; i < kCategoryCount; ++i) {
    auto c = static_cast<Category>(i);
    if (to_string(c) == name) return c;
  }
  throw Error("unknown diagnostic category '" + std::string(name) + "'");
}

std::string_view to_string(Status s) {
  switch (s) {
    case Status::kVerified: return "VERIFIED";
    case Status::kFailed: return "FAILED";
    case Status::kToolError: return "TOOL_ERROR";
    case Status::kTimeout: return "TIMEOUT";
    case Status::kEmptyInput: return "EMPTY_INPUT";
  }
  return "?";
}

VerifierReport empty_input_report() {
  VerifierReport r;
  r.status = Status::kEmptyInput;
  r.error_count = 1;
  return r;
}

Category categorize(std::string_view message, bool parse_phase) {
  std::string m(message);
  std::transform(m.begin(), m.end(), m.begin(), [](unsigned char c) { return std::tolower(c); });
  auto has = [&](const char* needle) { return m.find(needle) != std::string::npos; };

  if (has("postcondition")) return Category::kPostcondition;
  if (has("precondition")) return Category::kPrecondition;
  if (has("invariant")) return Category::kInvariant;
  if (has("decreases") || has("termination")) return Category::kTermination;
  if (has("assertion")) return Category::kAssertion;
  if (has("timed out") || has("time out")) return Category::kTimeout;
  if (parse_phase || has("unresolved identifier") || has("type mismatch") || has("invalid ") ||
      has("expected") || has("syntax") || has("not declared") || has("does not exist") ||
      has("resolution")) {
    return Category::kParseOrType;
  }
  return Category::kOther;
}

ParsedOutput parse_diagnostics(std::string_view tool_output) {
  static const std::regex kLocated(R"(^.*\((\d+),(\d+)\): Error: (.*)$)");
  static const std::regex kBare(R"(^\s*Error: (.*)$)");
  static const std::regex kSummary(
      R"(Dafny program verifier finished with (\d+) verified, (\d+) errors?(?:, (\d+) time outs?)?)");

  const bool parse_phase = tool_output.find("parse errors detected") != std::string_view::npos ||
                           tool_output.find("resolution/type errors detected") != std::string_view::npos;

  ParsedOutput out;
  std::optional<int> summary_errors;
  int summary_timeouts = 0;

  for (const std::string& raw : split_lines(tool_output)) {
    // Bound regex work on pathological input.
    std::string line = raw.size() > 4096 ? raw.substr(0, 4096) : raw;
    std::smatch m;
    if (std::regex_search(line, m, kSummary)) {
      try {
        summary_errors = std::stoi(m[2].str());
        if (m[3].matched) summary_timeouts = std::stoi(m[3].str());
      } catch (const std::exception&) {
        summary_errors.reset();
      }
      continue;
    }
    Diagnostic d;
    if (std::regex_match(line, m, kLocated)) {
      try {
        d.line = std::stoi(m[1].str());
        d.column = std::stoi(m[2].str());
      } catch (const std::exception&) {
      }
      d.message = std::string(trim(m[3].str()));
    } else if (std::regex_match(line, m, kBare)) {
      d.message = std::string(trim(m[1].str()));
    } else {
      continue;
    }
    d.category = categorize(d.message, parse_phase);
    out.diagnostics.push_back(std::move(d));
  }

  if (summary_errors) {
    for (int i = 0; i < summary_timeouts; ++i) {
      out.diagnostics.push_back({Category::kTimeout, std::nullopt, std::nullopt,
                                 "verification timed out"});
    }
    out.error_count = *summary_errors + summary_timeouts;
  } else if (!out.diagnostics.empty()) {
    out.error_count = static_cast<int>(out.diagnostics.size());
  } else {
    std::string_view tail = tool_output.size() > 512 ? tool_output.substr(tool_output.size() - 512) : tool_output;
    out.error_count = 1;
    out.recognized = false;
    out.diagnostics.push_back({Category::kOther, std::nullopt, std::nullopt,
                               "unrecognized verifier output: " + std::string(trim(tail))});
  }
  return out;
}

}  // namespace p2s::verifier

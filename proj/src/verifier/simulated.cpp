#include <algorithm>
#include <cctype>

#include "json.hpp"
#include "p2s/util/text.hpp"
#include "p2s/verifier/verifier.hpp"

namespace p2s::verifier {

using nlohmann::json;

namespace {

bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::string_view message_for(Category c) {
  switch (c) {
    case Category::kPostcondition: return "a postcondition could not be proved on this return path";
    case Category::kPrecondition: return "a precondition for this call could not be proved";
    case Category::kInvariant: return "this loop invariant could not be proved to be maintained by the loop";
    case Category::kTermination: return "decreases expression might not decrease";
    case Category::kAssertion: return "assertion might not hold";
    case Category::kParseOrType: return "unresolved identifier";
    case Category::kTimeout: return "verification timed out";
    case Category::kOther: return "verification error";
  }
  return "verification error";
}

}  // namespace

SimRuleSet SimRuleSet::parse(std::string_view json_text) {
  SimRuleSet set;
  try {
    json doc = json::parse(json_text);
    if (!doc.is_array()) throw Error("sim rule set must be a JSON list");
    for (const auto& r : doc) {
      SimRule rule;
      rule.marker = r.at("marker").get<std::string>();
      rule.error_count = r.at("error_count").get<int>();
      rule.category = parse_category(r.at("category").get<std::string>());
      if (rule.marker.empty()) throw Error("sim rule with empty marker");
      if (rule.error_count < 0) throw Error("sim rule '" + rule.marker + "' has negative error_count");
      set.rules.push_back(std::move(rule));
    }
  } catch (const json::exception& e) {
    throw Error(std::string("bad sim rule set: ") + e.what());
  }
  return set;
}

SimRuleSet SimRuleSet::load(const std::filesystem::path& path) { return parse(read_file(path)); }

SimRuleSet SimRuleSet::default_bug_markers(int max_k) {
  SimRuleSet set;
  for (int k = 1; k <= max_k; ++k) set.rules.push_back({"//BUG:" + std::to_string(k), k, Category::kInvariant});
  return set;
}

VerifierReport simulate_verify(const CandidateSource& source, const SimRuleSet& rules) {
  if (source.is_empty) return empty_input_report();

  VerifierReport report;
  const std::string& text = source.text;
  for (const auto& rule : rules.rules) {
    size_t pos = 0;
    while ((pos = text.find(rule.marker, pos)) != std::string::npos) {
      size_t end = pos + rule.marker.size();
      if (end < text.size() && ident_char(text[end])) {
        pos = end;
        continue;
      }
      const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(pos), '\n'));
      for (int i = 0; i < rule.error_count; ++i) {
        report.diagnostics.push_back({rule.category, line, 1,
                                      std::string(message_for(rule.category)) + " (#" + std::to_string(i + 1) +
                                          " of " + std::to_string(rule.error_count) + ")"});
      }
      report.error_count += rule.error_count;
      pos = end;
    }
  }
  // Source order, like the real tool.
  std::stable_sort(report.diagnostics.begin(), report.diagnostics.end(),
                   [](const Diagnostic& a, const Diagnostic& b) { return a.line < b.line; });
  report.status = report.error_count == 0 ? Status::kVerified : Status::kFailed;
  return report;
}

}  // namespace p2s::verifier

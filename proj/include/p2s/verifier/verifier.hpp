#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "p2s/gateway/prompt.hpp"
#include "p2s/util/error.hpp"

namespace p2s::verifier {

using gateway::CandidateSource;

enum class Category {
  kPostcondition,
  kPrecondition,
  kInvariant,
  kTermination,
  kAssertion,
  kParseOrType,
  kTimeout,
  kOther,
};
inline constexpr int kCategoryCount = 8;

std::string_view to_string(Category c);
Category parse_category(std::string_view name);

struct Diagnostic {
  Category category = Category::kOther;
  std::optional<int> line;
  std::optional<int> column;
  std::string message;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

enum class Status { kVerified, kFailed, kToolError, kTimeout, kEmptyInput };

std::string_view to_string(Status s);

/// Outcome of one verification run. status is VERIFIED exactly when
/// error_count is 0 and the input was non-empty.
struct VerifierReport {
  int error_count = 0;
  std::vector<Diagnostic> diagnostics;
  Status status = Status::kVerified;
  std::int64_t wall_time_ms = 0;

  bool verified() const { return status == Status::kVerified; }
  friend bool operator==(const VerifierReport&, const VerifierReport&) = default;
};

VerifierReport empty_input_report();

struct ParsedOutput {
  int error_count = 0;
  std::vector<Diagnostic> diagnostics;
  /// False when neither a summary line nor any error line was found and the
  /// conservative single OTHER diagnostic was synthesized.
  bool recognized = true;
};

/// Total over arbitrary bytes. Summary-line count wins over per-line count.
ParsedOutput parse_diagnostics(std::string_view tool_output);

Category categorize(std::string_view message, bool parse_phase);

/// Runs candidates through a verifier. Implementations are thread-safe.
class Verifier {
 public:
  virtual ~Verifier() = default;
  virtual VerifierReport verify(const CandidateSource& source) = 0;
};

struct DafnyConfig {
  std::string binary = "dafny";
  int timeout_s = 60;
  /// Extra seconds granted to the process beyond the verifier's own limit.
  int grace_s = 30;
};

/// Invokes `dafny verify <tmp.dfy> --verification-time-limit:<timeout_s>`.
class DafnyVerifier final : public Verifier {
 public:
  explicit DafnyVerifier(DafnyConfig cfg);
  VerifierReport verify(const CandidateSource& source) override;

  static std::vector<std::string> command_line(const DafnyConfig& cfg, const std::string& file);

 private:
  DafnyConfig cfg_;
};

struct SimRule {
  std::string marker;
  int error_count = 1;
  Category category = Category::kInvariant;
};

/// Rules for the simulated verifier. A marker matches when it occurs in the
/// source and is not immediately followed by an identifier character, so
/// "//BUG:1" does not fire inside "//BUG:12".
struct SimRuleSet {
  std::vector<SimRule> rules;

  static SimRuleSet load(const std::filesystem::path& path);
  static SimRuleSet parse(std::string_view json_text);
  /// "//BUG:1" .. "//BUG:<max_k>", each yielding k INVARIANT errors.
  static SimRuleSet default_bug_markers(int max_k = 20);
};

/// Deterministic stand-in for the real verifier: the report depends only on
/// which markers the source contains.
VerifierReport simulate_verify(const CandidateSource& source, const SimRuleSet& rules);

class SimulatedVerifier final : public Verifier {
 public:
  explicit SimulatedVerifier(SimRuleSet rules) : rules_(std::move(rules)) {}
  VerifierReport verify(const CandidateSource& source) override { return simulate_verify(source, rules_); }

 private:
  SimRuleSet rules_;
};

}  // namespace p2s::verifier

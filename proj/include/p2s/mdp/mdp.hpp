#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "p2s/gateway/prompt.hpp"
#include "p2s/verifier/verifier.hpp"

namespace p2s::mdp {

using gateway::CandidateSource;
using gateway::Prompt;
using verifier::VerifierReport;

enum class ActionName {
  kAppendVerifierErrors,
  kRequestLoopInvariants,
  kRequestDecreasesClause,
  kRestatePostconditions,
  kAddWorkedExample,
  kSimplifyAndRetry,
  kRequestAssertions,
  kForbidRecursionAndWhile,
  kEmphasizeContractVerbatim,
  kStepByStepReasoning,
  kResetToInitial,
  kNoChange,
};
inline constexpr int kActionCount = 12;

std::string_view to_string(ActionName a);
ActionName parse_action_name(std::string_view name);

struct EditAction {
  int id = 0;
  ActionName name = ActionName::kNoChange;
  std::string snippet;
};

/// The fixed 12-entry catalog. Snippet wording can be overridden from a TOML
/// file with one table per action name, each holding `snippet = "..."`.
class ActionCatalog {
 public:
  static ActionCatalog builtin();
  static ActionCatalog load(const std::filesystem::path& path);

  const EditAction& at(int id) const;
  const EditAction& at(ActionName name) const { return at(static_cast<int>(name)); }
  int size() const { return kActionCount; }

 private:
  std::array<EditAction, kActionCount> actions_;
};

inline constexpr int kStateDim = 24;
inline constexpr int kDefaultTMax = 7;
using StateVector = std::vector<double>;

/// Feature layout:
///   [0] t/T_max  [1] min(e,10)/10  [2..9] min(count_c,5)/5 per category
///   [10] empty flag  [11] min(len(prompt)/4096, 1)  [12..23] previous action one-hot
StateVector encode_state(const Prompt& prompt, const CandidateSource& code, const VerifierReport& report, int t,
                         std::optional<int> prev_action, int t_max = kDefaultTMax);

struct RewardConfig {
  double r_succ = 10.0;
  double alpha = 0.2;
  double beta = 0.5;
  double empty_penalty = -5.0;
  double gamma = 0.99;

  void validate() const;
};

double reward(const VerifierReport& report_next, const CandidateSource& code_next, const RewardConfig& cfg);

inline constexpr std::string_view kHintHeader = "\n--- REPAIR HINT ---\n";
inline constexpr int kMaxQuotedDiagnostics = 5;
inline constexpr std::size_t kMaxQuotedMessage = 240;

/// The hint block `a` would append for `report` (empty for RESET/NO_CHANGE).
std::string hint_block(const EditAction& a, const VerifierReport& report);

/// p (+) a. RESET_TO_INITIAL yields p0; NO_CHANGE yields p; everything else
/// appends its hint block unless that exact block is already present.
Prompt compose_prompt(const Prompt& p, const EditAction& a, const VerifierReport& report, const Prompt& p0);

}  // namespace p2s::mdp

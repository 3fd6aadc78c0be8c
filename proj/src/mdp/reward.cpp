#include "p2s/mdp/mdp.hpp"
#include "p2s/util/error.hpp"

namespace p2s::mdp {

void RewardConfig::validate() const {
  if (!(r_succ > 0)) throw ConfigError("reward.r_succ must be positive");
  if (!(alpha > 0)) throw ConfigError("reward.alpha must be positive");
  if (!(beta > 0)) throw ConfigError("reward.beta must be positive");
  if (!(gamma > 0 && gamma <= 1)) throw ConfigError("reward.gamma must be in (0, 1]");
  if (!(empty_penalty < -beta)) throw ConfigError("reward.empty_penalty must be below -beta");
}

double reward(const VerifierReport& report_next, const CandidateSource& code_next, const RewardConfig& cfg) {
  if (report_next.status == verifier::Status::kEmptyInput || code_next.is_empty) return cfg.empty_penalty;
  if (report_next.status == verifier::Status::kVerified) return cfg.r_succ;
  return -(cfg.alpha * report_next.error_count + cfg.beta);
}

}  // namespace p2s::mdp

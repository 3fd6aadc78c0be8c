#include <algorithm>

#include "p2s/mdp/mdp.hpp"
#include "p2s/util/error.hpp"

namespace p2s::mdp {

StateVector encode_state(const Prompt& prompt, const CandidateSource& code, const VerifierReport& report, int t,
                         std::optional<int> prev_action, int t_max) {
  if (t_max < 1 || t < 0 || t >= t_max) throw Error("encode_state: t out of range");
  StateVector s(kStateDim, 0.0);
  s[0] = static_cast<double>(t) / t_max;
  s[1] = std::min(std::max(report.error_count, 0), 10) / 10.0;
  std::array<int, verifier::kCategoryCount> counts{};
  for (const auto& d : report.diagnostics) ++counts[static_cast<std::size_t>(d.category)];
  for (int c = 0; c < verifier::kCategoryCount; ++c) s[2 + c] = std::min(counts[static_cast<std::size_t>(c)], 5) / 5.0;
  const bool empty = code.is_empty || report.status == verifier::Status::kEmptyInput;
  s[10] = empty ? 1.0 : 0.0;
  s[11] = std::min(static_cast<double>(prompt.text.size()) / 4096.0, 1.0);
  if (prev_action) {
    if (*prev_action < 0 || *prev_action >= kActionCount) throw Error("encode_state: bad previous action");
    s[12 + *prev_action] = 1.0;
  }
  return s;
}

}  // namespace p2s::mdp

#include "p2s/mdp/mdp.hpp"

namespace p2s::mdp {

namespace {

std::string quote_diagnostic(const verifier::Diagnostic& d) {
  std::string line = "- [" + std::string(verifier::to_string(d.category)) + "]";
  if (d.line) line += " line " + std::to_string(*d.line);
  std::string msg = d.message.substr(0, kMaxQuotedMessage);
  for (char& c : msg) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return line + ": " + msg;
}

// True when `block` already occurs in `text` as a whole hint block, i.e.
// followed by the end of the prompt or by the next hint header.
bool has_block(const std::string& text, const std::string& block) {
  for (size_t pos = text.find(block); pos != std::string::npos; pos = text.find(block, pos + 1)) {
    size_t end = pos + block.size();
    if (end == text.size() || text.compare(end, kHintHeader.size(), kHintHeader) == 0) return true;
  }
  return false;
}

}  // namespace

std::string hint_block(const EditAction& a, const VerifierReport& report) {
  if (a.name == ActionName::kResetToInitial || a.name == ActionName::kNoChange) return {};
  std::string block(kHintHeader);
  block += a.snippet;
  if (a.name == ActionName::kAppendVerifierErrors) {
    int quoted = 0;
    for (const auto& d : report.diagnostics) {
      if (quoted == kMaxQuotedDiagnostics) break;
      block += "\n" + quote_diagnostic(d);
      ++quoted;
    }
    if (quoted == 0) block += "\n- (verifier reported " + std::to_string(report.error_count) + " error(s))";
  }
  return block;
}

Prompt compose_prompt(const Prompt& p, const EditAction& a, const VerifierReport& report, const Prompt& p0) {
  if (a.name == ActionName::kResetToInitial) {
    Prompt out = p0;
    out.meta = p.meta;
    return out;
  }
  Prompt out = p;
  std::string block = hint_block(a, report);
  if (!block.empty() && !has_block(out.text, block)) out.text += block;
  return out;
}

}  // namespace p2s::mdp

#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace p2s::gateway {

/// Text submitted to the generative model. `meta` carries bookkeeping the
/// loop attaches (task id, iteration, last applied action); backends that
/// only look at text ignore it.
struct Prompt {
  std::string text;
  std::map<std::string, std::string> meta;

  friend bool operator==(const Prompt& a, const Prompt& b) { return a.text == b.text; }
};

struct Completion {
  std::string raw_text;
  std::string backend_id;
  std::int64_t latency_ms = 0;
  bool truncated = false;
};

/// Code extracted from a completion. `is_empty` holds exactly when `text`
/// has no non-whitespace content.
struct CandidateSource {
  std::string text;
  bool is_empty = true;

  static CandidateSource from_text(std::string text);
  static CandidateSource empty() { return {}; }
};

}  // namespace p2s::gateway

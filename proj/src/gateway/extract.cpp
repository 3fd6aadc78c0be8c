#include <stdexcept>

#include "p2s/gateway/gateway.hpp"
#include "p2s/util/text.hpp"

namespace p2s::gateway {

CandidateSource CandidateSource::from_text(std::string text) {
  CandidateSource c;
  c.is_empty = is_blank(text);
  c.text = std::move(text);
  return c;
}

CandidateSource extract_code(const Completion& completion) {
  std::string_view raw = completion.raw_text;
  constexpr std::string_view kFence = "```";

  size_t open = raw.find(kFence);
  if (open == std::string_view::npos) return CandidateSource::from_text(std::string(trim(raw)));

  // The info string (e.g. "dafny") runs to the end of the opening line.
  size_t body_start = raw.find('\n', open + kFence.size());
  if (body_start == std::string_view::npos) return CandidateSource::empty();
  ++body_start;
  size_t close = raw.find(kFence, body_start);
  std::string_view body =
      close == std::string_view::npos ? raw.substr(body_start) : raw.substr(body_start, close - body_start);
  return CandidateSource::from_text(std::string(trim(body)));
}

}  // namespace p2s::gateway

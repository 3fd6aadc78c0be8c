#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace p2s::transpiler {

struct Token {
  enum class Kind { kName, kNumber, kString, kOp, kNewline, kIndent, kDedent, kEnd };
  Kind kind;
  std::string text;  // for strings: the decoded value
  int line;
  bool is_float = false;
};

/// Python-style tokenizer: INDENT/DEDENT from leading whitespace, implicit
/// line joining inside brackets, comments dropped.
std::vector<Token> tokenize(std::string_view src);

}  // namespace p2s::transpiler

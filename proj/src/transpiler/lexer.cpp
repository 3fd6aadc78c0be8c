#include "lexer.hpp"

#include <array>
#include <cctype>

#include "p2s/transpiler/script_ast.hpp"

namespace p2s::transpiler {

namespace {

constexpr std::array<std::string_view, 26> kOps = {
    "**=", "//=", ">>=", "<<=", "...", "**", "//", "==", "!=", "<=", ">=", "->", "+=",
    "-=",  "*=",  "/=",  "%=",  "&=",  "|=", "^=", ">>", "<<", ":=", "@=", "<>", "~"};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class Lexer {
 public:
  explicit Lexer(std::string_view src) : s_(src) {}

  std::vector<Token> run() {
    indents_.push_back(0);
    bool at_line_start = true;
    while (pos_ < s_.size()) {
      if (at_line_start && depth_ == 0) {
        if (!line_start()) continue;  // blank or comment line consumed
        at_line_start = false;
      }
      char c = s_[pos_];
      if (c == '\n') {
        ++pos_;
        if (depth_ == 0) {
          emit(Token::Kind::kNewline, "");
          at_line_start = true;
        }
        ++line_;
        continue;
      }
      if (c == ' ' || c == '\t' || c == '\r' || c == '\f') {
        ++pos_;
        continue;
      }
      if (c == '#') {
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
        continue;
      }
      if (c == '\\' && pos_ + 1 < s_.size() && (s_[pos_ + 1] == '\n' || s_[pos_ + 1] == '\r')) {
        pos_ += s_[pos_ + 1] == '\r' ? 3 : 2;
        ++line_;
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c)) ||
          (c == '.' && pos_ + 1 < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_ + 1])))) {
        number();
        continue;
      }
      if (ident_start(c)) {
        size_t start = pos_;
        while (pos_ < s_.size() && ident_char(s_[pos_])) ++pos_;
        std::string_view word = s_.substr(start, pos_ - start);
        if (pos_ < s_.size() && (s_[pos_] == '"' || s_[pos_] == '\'') && is_prefix(word)) {
          string(word);
        } else {
          emit(Token::Kind::kName, std::string(word));
        }
        continue;
      }
      if (c == '"' || c == '\'') {
        string("");
        continue;
      }
      op();
    }
    if (!toks_.empty() && toks_.back().kind != Token::Kind::kNewline) emit(Token::Kind::kNewline, "");
    while (indents_.size() > 1) {
      indents_.pop_back();
      emit(Token::Kind::kDedent, "");
    }
    emit(Token::Kind::kEnd, "");
    return std::move(toks_);
  }

 private:
  void emit(Token::Kind k, std::string text, bool is_float = false) {
    toks_.push_back({k, std::move(text), line_, is_float});
  }

  // Measures indentation; returns false when the line was blank/comment and
  // has been skipped entirely.
  bool line_start() {
    int col = 0;
    size_t p = pos_;
    while (p < s_.size() && (s_[p] == ' ' || s_[p] == '\t' || s_[p] == '\f')) {
      col = s_[p] == '\t' ? (col / 8 + 1) * 8 : col + 1;
      ++p;
    }
    if (p >= s_.size()) {
      pos_ = p;
      return false;
    }
    if (s_[p] == '\n' || s_[p] == '\r' || s_[p] == '#') {
      while (p < s_.size() && s_[p] != '\n') ++p;
      if (p < s_.size()) ++p;
      ++line_;
      pos_ = p;
      return false;
    }
    pos_ = p;
    if (col > indents_.back()) {
      indents_.push_back(col);
      emit(Token::Kind::kIndent, "");
    } else {
      while (col < indents_.back()) {
        indents_.pop_back();
        emit(Token::Kind::kDedent, "");
      }
      if (col != indents_.back()) throw SyntaxError(line_, "inconsistent dedent");
    }
    return true;
  }

  static bool is_prefix(std::string_view w) {
    if (w.size() > 2) return false;
    for (char c : w) {
      char l = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      if (l != 'r' && l != 'b' && l != 'u' && l != 'f') return false;
    }
    return true;
  }

  void number() {
    size_t start = pos_;
    bool is_float = false;
    if (s_[pos_] == '0' && pos_ + 1 < s_.size() && (s_[pos_ + 1] == 'x' || s_[pos_ + 1] == 'X')) {
      pos_ += 2;
      while (pos_ < s_.size() && (std::isxdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    } else {
      auto digits = [&] {
        while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      };
      digits();
      if (pos_ < s_.size() && s_[pos_] == '.') {
        is_float = true;
        ++pos_;
        digits();
      }
      if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
        size_t save = pos_;
        ++pos_;
        if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
        if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
          is_float = true;
          digits();
        } else {
          pos_ = save;
        }
      }
    }
    if (pos_ < s_.size() && (s_[pos_] == 'j' || s_[pos_] == 'J')) throw UnsupportedConstruct(line_, "complex literal");
    if (pos_ < s_.size() && ident_start(s_[pos_])) throw SyntaxError(line_, "malformed number");
    std::string text;
    for (size_t i = start; i < pos_; ++i) {
      if (s_[i] != '_') text += s_[i];
    }
    emit(Token::Kind::kNumber, text, is_float);
  }

  void string(std::string_view prefix) {
    bool raw = false;
    for (char c : prefix) {
      if (c == 'r' || c == 'R') raw = true;
      if (c == 'f' || c == 'F') throw UnsupportedConstruct(line_, "f-string");
      if (c == 'b' || c == 'B') throw UnsupportedConstruct(line_, "bytes literal");
    }
    const int start_line = line_;
    const char q = s_[pos_];
    const bool triple = pos_ + 2 < s_.size() && s_[pos_ + 1] == q && s_[pos_ + 2] == q;
    pos_ += triple ? 3 : 1;
    std::string out;
    while (true) {
      if (pos_ >= s_.size()) throw SyntaxError(start_line, "unterminated string");
      char c = s_[pos_];
      if (triple) {
        if (c == q && pos_ + 2 < s_.size() && s_[pos_ + 1] == q && s_[pos_ + 2] == q) {
          pos_ += 3;
          break;
        }
      } else if (c == q) {
        ++pos_;
        break;
      } else if (c == '\n') {
        throw SyntaxError(start_line, "unterminated string");
      }
      if (c == '\n') ++line_;
      if (c == '\\' && !raw && pos_ + 1 < s_.size()) {
        char e = s_[pos_ + 1];
        pos_ += 2;
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case 'r': out += '\r'; break;
          case '0': out += '\0'; break;
          case '\\': out += '\\'; break;
          case '\'': out += '\''; break;
          case '"': out += '"'; break;
          case '\n': ++line_; break;
          default:
            out += '\\';
            out += e;
        }
        continue;
      }
      out += c;
      ++pos_;
    }
    toks_.push_back({Token::Kind::kString, std::move(out), start_line, false});
  }

  void op() {
    for (std::string_view o : kOps) {
      if (s_.substr(pos_, o.size()) == o) {
        pos_ += o.size();
        emit(Token::Kind::kOp, std::string(o));
        return;
      }
    }
    char c = s_[pos_];
    static constexpr std::string_view kSingles = "+-*/%<>=()[]{},:.;@&|^!";
    if (kSingles.find(c) == std::string_view::npos) {
      throw SyntaxError(line_, std::string("unexpected character '") + c + "'");
    }
    if (c == '(' || c == '[' || c == '{') ++depth_;
    if (c == ')' || c == ']' || c == '}') {
      if (depth_ == 0) throw SyntaxError(line_, std::string("unbalanced '") + c + "'");
      --depth_;
    }
    ++pos_;
    emit(Token::Kind::kOp, std::string(1, c));
  }

  std::string_view s_;
  size_t pos_ = 0;
  int line_ = 1;
  int depth_ = 0;
  std::vector<int> indents_;
  std::vector<Token> toks_;
};

}  // namespace

std::vector<Token> tokenize(std::string_view src) { return Lexer(src).run(); }

}  // namespace p2s::transpiler

#include <set>

#include "lexer.hpp"
#include "p2s/transpiler/script_ast.hpp"

namespace p2s::transpiler {

namespace {

using K = Token::Kind;
using EK = PyExpr::Kind;
using SK = PyStmt::Kind;

const std::set<std::string, std::less<>> kKeywords = {
    "False", "None",   "True",    "and",      "as",     "assert", "async", "await",  "break",
    "class", "continue", "def",   "del",      "elif",   "else",   "except", "finally", "for",
    "from",  "global", "if",      "import",   "in",     "is",     "lambda", "nonlocal", "not",
    "or",    "pass",   "raise",   "return",   "try",    "while",  "with",  "yield"};

const std::set<std::string, std::less<>> kUnsupportedStmtKeywords = {
    "try", "with", "async", "raise", "global", "nonlocal", "del", "assert", "yield", "await", "lambda"};

const std::set<std::string, std::less<>> kAugOps = {"+=", "-=", "*=", "/=", "//=", "%=", "**="};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : t_(std::move(toks)) {}

  ScriptAst module() {
    ScriptAst ast;
    skip_newlines();
    if (at(K::kEnd)) throw SyntaxError(1, "empty module");
    while (!at(K::kEnd)) {
      if (at(K::kNewline)) {
        next();
        continue;
      }
      const int line = peek().line;
      if (is_kw("import") || is_kw("from")) {
        import_stmt(ast.imports);
      } else if (is_op("@") || is_kw("def")) {
        ast.functions.push_back(function());
      } else if (is_kw("class")) {
        ast.classes.push_back(class_def());
      } else {
        PyStmt s = statement();
        // Module docstrings are harmless; anything else at top level is not
        // part of the backend's emission shape.
        if (s.kind == SK::kExpr && s.exprs[0].kind == EK::kStr) continue;
        throw UnsupportedConstruct(line, "top-level statement");
      }
    }
    return ast;
  }

 private:
  const Token& peek(size_t k = 0) const { return t_[std::min(i_ + k, t_.size() - 1)]; }
  bool at(K k) const { return peek().kind == k; }
  bool is_op(std::string_view s, size_t k = 0) const { return peek(k).kind == K::kOp && peek(k).text == s; }
  bool is_kw(std::string_view s, size_t k = 0) const { return peek(k).kind == K::kName && peek(k).text == s; }
  const Token& next() { return t_[i_ < t_.size() - 1 ? i_++ : i_]; }
  void skip_newlines() {
    while (at(K::kNewline)) next();
  }

  [[noreturn]] void fail(const std::string& what) const { throw SyntaxError(peek().line, what); }

  void expect_op(std::string_view s) {
    if (!is_op(s)) fail("expected '" + std::string(s) + "'");
    next();
  }
  void expect_kw(std::string_view s) {
    if (!is_kw(s)) fail("expected '" + std::string(s) + "'");
    next();
  }
  void expect(K k, const char* what) {
    if (!at(k)) fail(std::string("expected ") + what);
    next();
  }
  std::string ident() {
    if (!at(K::kName) || kKeywords.contains(peek().text)) fail("expected identifier");
    return next().text;
  }

  std::string dotted_name() {
    std::string n = ident();
    while (is_op(".")) {
      next();
      n += "." + ident();
    }
    return n;
  }

  void import_stmt(std::vector<PyImport>& out) {
    const int line = peek().line;
    if (is_kw("import")) {
      next();
      while (true) {
        PyImport imp;
        imp.line = line;
        imp.module = dotted_name();
        if (is_kw("as")) {
          next();
          imp.alias = ident();
        }
        out.push_back(std::move(imp));
        if (!is_op(",")) break;
        next();
      }
    } else {
      next();
      PyImport imp;
      imp.line = line;
      while (is_op(".") || is_op("...")) imp.module += next().text;
      if (!is_kw("import")) imp.module += dotted_name();
      expect_kw("import");
      if (is_op("*")) {
        next();
        imp.names.push_back("*");
      } else {
        const bool paren = is_op("(");
        if (paren) next();
        while (true) {
          std::string n = ident();
          if (is_kw("as")) {
            next();
            n += " as " + ident();
          }
          imp.names.push_back(std::move(n));
          if (!is_op(",")) break;
          next();
          if (paren && is_op(")")) break;
        }
        if (paren) expect_op(")");
      }
      out.push_back(std::move(imp));
    }
    end_of_simple();
  }

  void end_of_simple() {
    if (is_op(";")) fail("multiple statements on one line");
    if (!at(K::kNewline) && !at(K::kEnd)) fail("expected end of line");
    if (at(K::kNewline)) next();
  }

  PyFunction function() {
    std::vector<std::string> decorators;
    while (is_op("@")) {
      next();
      decorators.push_back(unparse(expr_test()));
      expect(K::kNewline, "newline after decorator");
      skip_newlines();
    }
    if (is_kw("class")) throw UnsupportedConstruct(peek().line, "decorated class");
    if (is_kw("async")) throw UnsupportedConstruct(peek().line, "async def");
    PyFunction f;
    f.line = peek().line;
    f.decorators = std::move(decorators);
    expect_kw("def");
    f.name = ident();
    expect_op("(");
    while (!is_op(")")) {
      if (is_op("*") || is_op("**")) throw UnsupportedConstruct(peek().line, "variadic parameters");
      PyParam p;
      p.name = ident();
      if (is_op(":")) {
        next();
        p.annotation = unparse(expr_test());
      }
      if (is_op("=")) throw UnsupportedConstruct(peek().line, "default argument");
      f.params.push_back(std::move(p));
      if (!is_op(",")) break;
      next();
    }
    expect_op(")");
    if (is_op("->")) {
      next();
      f.returns = unparse(expr_test());
    }
    expect_op(":");
    f.body = block();
    return f;
  }

  PyClass class_def() {
    PyClass c;
    c.line = peek().line;
    expect_kw("class");
    c.name = ident();
    if (is_op("(")) {
      next();
      while (!is_op(")")) {
        c.bases.push_back(unparse(expr_test()));
        if (!is_op(",")) break;
        next();
      }
      expect_op(")");
    }
    expect_op(":");
    expect(K::kNewline, "newline after class header");
    skip_newlines();
    expect(K::kIndent, "indented class body");
    while (!at(K::kDedent) && !at(K::kEnd)) {
      if (at(K::kNewline)) {
        next();
        continue;
      }
      if (is_op("@") || is_kw("def")) {
        c.methods.push_back(function());
      } else if (is_kw("class")) {
        throw UnsupportedConstruct(peek().line, "nested class");
      } else {
        c.members.push_back(statement());
      }
    }
    if (at(K::kDedent)) next();
    return c;
  }

  std::vector<PyStmt> block() {
    std::vector<PyStmt> body;
    if (!at(K::kNewline)) {
      // Single-line suite: `if x: return y`.
      body.push_back(simple_statement());
      return body;
    }
    next();
    skip_newlines();
    expect(K::kIndent, "indented block");
    while (!at(K::kDedent) && !at(K::kEnd)) {
      if (at(K::kNewline)) {
        next();
        continue;
      }
      if (is_op("@") || is_kw("def")) throw UnsupportedConstruct(peek().line, "nested function");
      if (is_kw("class")) throw UnsupportedConstruct(peek().line, "nested class");
      body.push_back(statement());
    }
    if (at(K::kDedent)) next();
    return body;
  }

  PyStmt statement() {
    const int line = peek().line;
    if (at(K::kName) && kUnsupportedStmtKeywords.contains(peek().text)) {
      throw UnsupportedConstruct(line, peek().text + " statement");
    }
    if (is_kw("if")) {
      next();
      return if_tail(line);
    }
    if (is_kw("while")) {
      next();
      PyStmt s{SK::kWhile, {expr_test()}, "", {}, {}, line};
      expect_op(":");
      s.body = block();
      if (is_kw("else")) throw UnsupportedConstruct(peek().line, "while-else");
      return s;
    }
    if (is_kw("for")) {
      next();
      PyStmt s{SK::kFor, {}, "", {}, {}, line};
      s.exprs.push_back(target_list());
      expect_kw("in");
      s.exprs.push_back(testlist());
      expect_op(":");
      s.body = block();
      if (is_kw("else")) throw UnsupportedConstruct(peek().line, "for-else");
      return s;
    }
    if (is_kw("import") || is_kw("from")) throw UnsupportedConstruct(line, "local import");
    return simple_statement();
  }

  PyStmt if_tail(int line) {
    PyStmt s{SK::kIf, {expr_test()}, "", {}, {}, line};
    expect_op(":");
    s.body = block();
    if (is_kw("elif")) {
      const int l2 = peek().line;
      next();
      s.orelse.push_back(if_tail(l2));
    } else if (is_kw("else")) {
      next();
      expect_op(":");
      s.orelse = block();
    }
    return s;
  }

  PyExpr target_list() {
    const int line = peek().line;
    PyExpr first = arith();
    if (!is_op(",")) return first;
    PyExpr tup{EK::kTuple, "", 0, 0.0, {std::move(first)}, line};
    while (is_op(",")) {
      next();
      if (is_kw("in")) break;
      tup.kids.push_back(arith());
    }
    return tup;
  }

  PyStmt simple_statement() {
    const int line = peek().line;
    PyStmt s;
    s.line = line;
    if (at(K::kName) && kUnsupportedStmtKeywords.contains(peek().text)) {
      throw UnsupportedConstruct(line, peek().text + " statement");
    }
    if (is_kw("pass")) {
      next();
      s.kind = SK::kPass;
    } else if (is_kw("break")) {
      next();
      s.kind = SK::kBreak;
    } else if (is_kw("continue")) {
      next();
      s.kind = SK::kContinue;
    } else if (is_kw("return")) {
      next();
      s.kind = SK::kReturn;
      if (!at(K::kNewline) && !at(K::kEnd)) s.exprs.push_back(testlist());
    } else {
      PyExpr lhs = testlist();
      if (is_op("=")) {
        next();
        PyExpr rhs = testlist();
        if (is_op("=")) throw UnsupportedConstruct(line, "chained assignment");
        s.kind = SK::kAssign;
        s.exprs = {std::move(lhs), std::move(rhs)};
      } else if (at(K::kOp) && kAugOps.contains(peek().text)) {
        std::string op = next().text;
        op.pop_back();
        s.kind = SK::kAugAssign;
        s.text = op;
        s.exprs = {std::move(lhs), testlist()};
      } else if (at(K::kOp) && peek().text.size() >= 2 && peek().text.back() == '=' && peek().text != "==" &&
                 peek().text != "<=" && peek().text != ">=" && peek().text != "!=") {
        throw UnsupportedConstruct(line, "augmented assignment '" + peek().text + "'");
      } else if (is_op(":")) {
        next();
        s.kind = SK::kAnnAssign;
        s.text = unparse(expr_test());
        s.exprs.push_back(std::move(lhs));
        if (is_op("=")) {
          next();
          s.exprs.push_back(testlist());
        }
      } else {
        s.kind = SK::kExpr;
        s.exprs.push_back(std::move(lhs));
      }
    }
    end_of_simple();
    return s;
  }

  PyExpr testlist() {
    const int line = peek().line;
    PyExpr first = expr_test();
    if (!is_op(",")) return first;
    PyExpr tup{EK::kTuple, "", 0, 0.0, {std::move(first)}, line};
    while (is_op(",")) {
      next();
      if (at(K::kNewline) || is_op("=") || is_op(")")) break;
      tup.kids.push_back(expr_test());
    }
    return tup;
  }

  PyExpr expr_test() {
    const int line = peek().line;
    if (is_kw("lambda")) throw UnsupportedConstruct(line, "lambda");
    if (is_kw("yield")) throw UnsupportedConstruct(line, "yield");
    if (is_kw("await")) throw UnsupportedConstruct(line, "await");
    PyExpr body = expr_or();
    if (is_op(":=")) throw UnsupportedConstruct(line, "assignment expression");
    if (!is_kw("if")) return body;
    next();
    PyExpr cond = expr_or();
    expect_kw("else");
    PyExpr orelse = expr_test();
    return {EK::kTernary, "", 0, 0.0, {std::move(cond), std::move(body), std::move(orelse)}, line};
  }

  PyExpr expr_or() {
    PyExpr l = expr_and();
    while (is_kw("or")) {
      const int line = next().line;
      l = {EK::kBoolOp, "or", 0, 0.0, {std::move(l), expr_and()}, line};
    }
    return l;
  }

  PyExpr expr_and() {
    PyExpr l = expr_not();
    while (is_kw("and")) {
      const int line = next().line;
      l = {EK::kBoolOp, "and", 0, 0.0, {std::move(l), expr_not()}, line};
    }
    return l;
  }

  PyExpr expr_not() {
    if (is_kw("not")) {
      const int line = next().line;
      return {EK::kUnary, "not", 0, 0.0, {expr_not()}, line};
    }
    return comparison();
  }

  bool at_compare() const {
    if (at(K::kOp)) {
      const std::string& s = peek().text;
      return s == "<" || s == ">" || s == "==" || s == ">=" || s == "<=" || s == "!=" || s == "<>";
    }
    return is_kw("in") || is_kw("is") || (is_kw("not") && is_kw("in", 1));
  }

  PyExpr comparison() {
    PyExpr l = arith_or_bitwise();
    if (!at_compare()) return l;
    const int line = peek().line;
    if (at(K::kName)) throw UnsupportedConstruct(line, "'" + peek().text + "' comparison");
    std::string op = next().text;
    if (op == "<>") fail("invalid operator '<>'");
    PyExpr r = arith_or_bitwise();
    if (at_compare()) throw UnsupportedConstruct(line, "chained comparison");
    return {EK::kCompare, op, 0, 0.0, {std::move(l), std::move(r)}, line};
  }

  PyExpr arith_or_bitwise() {
    PyExpr l = arith();
    if (is_op("|") || is_op("&") || is_op("^") || is_op("<<") || is_op(">>")) {
      throw UnsupportedConstruct(peek().line, "bitwise operator '" + peek().text + "'");
    }
    return l;
  }

  PyExpr arith() {
    PyExpr l = term();
    while (is_op("+") || is_op("-")) {
      const Token& op = next();
      const int line = op.line;
      std::string o = op.text;
      l = PyExpr::binop(o, std::move(l), term(), line);
    }
    return l;
  }

  PyExpr term() {
    PyExpr l = factor();
    while (is_op("*") || is_op("/") || is_op("//") || is_op("%") || is_op("@")) {
      if (is_op("@")) throw UnsupportedConstruct(peek().line, "matrix multiplication");
      const Token& op = next();
      const int line = op.line;
      std::string o = op.text;
      l = PyExpr::binop(o, std::move(l), factor(), line);
    }
    return l;
  }

  PyExpr factor() {
    if (is_op("-") || is_op("+")) {
      const Token& op = next();
      const int line = op.line;
      std::string o = op.text;
      return {EK::kUnary, o, 0, 0.0, {factor()}, line};
    }
    if (is_op("~")) throw UnsupportedConstruct(peek().line, "bitwise operator '~'");
    return power();
  }

  PyExpr power() {
    PyExpr base = atom_expr();
    if (is_op("**")) {
      const int line = next().line;
      return PyExpr::binop("**", std::move(base), factor(), line);
    }
    return base;
  }

  PyExpr atom_expr() {
    PyExpr e = atom();
    while (true) {
      const int line = peek().line;
      if (is_op("(")) {
        next();
        std::vector<PyExpr> args;
        while (!is_op(")")) {
          if (is_op("*") || is_op("**")) throw UnsupportedConstruct(line, "star arguments");
          if (at(K::kName) && is_op("=", 1)) throw UnsupportedConstruct(line, "keyword argument");
          args.push_back(expr_test());
          if (is_kw("for")) throw UnsupportedConstruct(line, "generator expression");
          if (!is_op(",")) break;
          next();
        }
        expect_op(")");
        e = PyExpr::call(std::move(e), std::move(args), line);
      } else if (is_op("[")) {
        next();
        if (is_op(":")) throw UnsupportedConstruct(line, "slice");
        PyExpr idx = testlist();
        if (is_op(":")) throw UnsupportedConstruct(line, "slice");
        expect_op("]");
        e = {EK::kSubscript, "", 0, 0.0, {std::move(e), std::move(idx)}, line};
      } else if (is_op(".")) {
        next();
        e = PyExpr::attribute(std::move(e), ident(), line);
      } else {
        return e;
      }
    }
  }

  PyExpr atom() {
    const Token& tok = peek();
    const int line = tok.line;
    switch (tok.kind) {
      case K::kNumber: {
        next();
        if (tok.is_float) {
          return {EK::kFloat, tok.text, 0, std::stod(tok.text), {}, line};
        }
        try {
          std::size_t used = 0;
          const bool hex = tok.text.size() > 2 && (tok.text[1] == 'x' || tok.text[1] == 'X');
          long long v = std::stoll(tok.text, &used, hex ? 16 : 10);
          if (!hex && tok.text.size() > 1 && tok.text[0] == '0' && v != 0) fail("leading zero in integer literal");
          return {EK::kInt, tok.text, v, 0.0, {}, line};
        } catch (const std::out_of_range&) {
          // Too large for 64 bits; keep the spelling so lowering can reject it.
          return {EK::kInt, tok.text, INT64_MAX, 0.0, {}, line};
        }
      }
      case K::kString: {
        std::string s;
        while (at(K::kString)) s += next().text;
        return {EK::kStr, s, 0, 0.0, {}, line};
      }
      case K::kName: {
        if (tok.text == "True" || tok.text == "False") {
          next();
          return {EK::kBool, tok.text, tok.text == "True" ? 1 : 0, 0.0, {}, line};
        }
        if (tok.text == "None") {
          next();
          return {EK::kNone, "None", 0, 0.0, {}, line};
        }
        if (tok.text == "lambda") throw UnsupportedConstruct(line, "lambda");
        if (tok.text == "yield") throw UnsupportedConstruct(line, "yield");
        return PyExpr::name(ident(), line);
      }
      case K::kOp: {
        if (tok.text == "(") {
          next();
          if (is_op(")")) {
            next();
            return {EK::kTuple, "", 0, 0.0, {}, line};
          }
          if (is_kw("yield")) throw UnsupportedConstruct(line, "yield");
          PyExpr first = expr_test();
          if (is_kw("for")) throw UnsupportedConstruct(line, "generator expression");
          if (!is_op(",")) {
            expect_op(")");
            return first;
          }
          PyExpr tup{EK::kTuple, "", 0, 0.0, {std::move(first)}, line};
          while (is_op(",")) {
            next();
            if (is_op(")")) break;
            tup.kids.push_back(expr_test());
          }
          expect_op(")");
          return tup;
        }
        if (tok.text == "[") {
          next();
          PyExpr list{EK::kList, "", 0, 0.0, {}, line};
          while (!is_op("]")) {
            list.kids.push_back(expr_test());
            if (is_kw("for")) throw UnsupportedConstruct(line, "list comprehension");
            if (!is_op(",")) break;
            next();
          }
          expect_op("]");
          return list;
        }
        if (tok.text == "{") throw UnsupportedConstruct(line, "dict or set display");
        if (tok.text == "...") throw UnsupportedConstruct(line, "ellipsis");
        fail("unexpected '" + tok.text + "'");
      }
      case K::kIndent: fail("unexpected indent");
      case K::kDedent:
      case K::kNewline:
      case K::kEnd: fail("unexpected end of line");
    }
    fail("unexpected token");
  }

  std::vector<Token> t_;
  size_t i_ = 0;
};

}  // namespace

ScriptAst parse_compiled_source(std::string_view text) {
  std::vector<Token> toks = tokenize(text);
  return Parser(std::move(toks)).module();
}

}  // namespace p2s::transpiler

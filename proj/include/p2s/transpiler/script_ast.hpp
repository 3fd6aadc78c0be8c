#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "p2s/util/error.hpp"

namespace p2s::transpiler {

class SyntaxError : public Error {
 public:
  SyntaxError(int line, const std::string& what)
      : Error("syntax error at line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class UnsupportedConstruct : public Error {
 public:
  UnsupportedConstruct(int line, std::string construct)
      : Error("unsupported construct at line " + std::to_string(line) + ": " + construct),
        line_(line),
        construct_(std::move(construct)) {}
  int line() const { return line_; }
  const std::string& construct() const { return construct_; }

 private:
  int line_;
  std::string construct_;
};

// Python-subset syntax tree. Children are held by value.

struct PyExpr {
  enum class Kind { kName, kInt, kFloat, kStr, kBool, kNone, kBinOp, kUnary, kCompare, kBoolOp, kCall,
                    kAttribute, kSubscript, kTernary, kList, kTuple };
  Kind kind = Kind::kName;
  std::string text;  // identifier, operator, attribute name, literal spelling
  std::int64_t ival = 0;
  double fval = 0.0;
  std::vector<PyExpr> kids;
  int line = 0;

  friend bool operator==(const PyExpr& a, const PyExpr& b) {
    return a.kind == b.kind && a.text == b.text && a.ival == b.ival && a.fval == b.fval && a.kids == b.kids;
  }

  static PyExpr name(std::string n, int line = 0) { return {Kind::kName, std::move(n), 0, 0.0, {}, line}; }
  static PyExpr integer(std::int64_t v, int line = 0) { return {Kind::kInt, std::to_string(v), v, 0.0, {}, line}; }
  static PyExpr binop(std::string op, PyExpr l, PyExpr r, int line = 0) {
    return {Kind::kBinOp, std::move(op), 0, 0.0, {std::move(l), std::move(r)}, line};
  }
  static PyExpr call(PyExpr fn, std::vector<PyExpr> args, int line = 0) {
    std::vector<PyExpr> kids{std::move(fn)};
    for (auto& a : args) kids.push_back(std::move(a));
    return {Kind::kCall, "", 0, 0.0, std::move(kids), line};
  }
  static PyExpr attribute(PyExpr value, std::string attr, int line = 0) {
    return {Kind::kAttribute, std::move(attr), 0, 0.0, {std::move(value)}, line};
  }
};

struct PyParam {
  std::string name;
  std::optional<std::string> annotation;
  friend bool operator==(const PyParam&, const PyParam&) = default;
};

struct PyStmt {
  enum class Kind { kAssign, kAnnAssign, kAugAssign, kExpr, kIf, kWhile, kFor, kReturn, kPass, kBreak, kContinue };
  Kind kind = Kind::kPass;
  // Assign: exprs = {target, value}. AnnAssign: {target[, value]} + text = annotation.
  // AugAssign: {target, value} + text = operator ("+", "//", ...). Expr: {value}.
  // If/While: exprs = {cond}, body, orelse. For: exprs = {target, iter}, body.
  // Return: exprs = {} or {value}.
  std::vector<PyExpr> exprs;
  std::string text;
  std::vector<PyStmt> body;
  std::vector<PyStmt> orelse;
  int line = 0;

  friend bool operator==(const PyStmt& a, const PyStmt& b) {
    return a.kind == b.kind && a.exprs == b.exprs && a.text == b.text && a.body == b.body && a.orelse == b.orelse;
  }
};

struct PyFunction {
  std::string name;
  std::vector<std::string> decorators;
  std::vector<PyParam> params;
  std::optional<std::string> returns;
  std::vector<PyStmt> body;
  int line = 0;

  friend bool operator==(const PyFunction& a, const PyFunction& b) {
    return a.name == b.name && a.decorators == b.decorators && a.params == b.params && a.returns == b.returns &&
           a.body == b.body;
  }
};

struct PyClass {
  std::string name;
  std::vector<std::string> bases;
  std::vector<PyFunction> methods;
  /// Class-level statements other than method definitions (fields, pass).
  std::vector<PyStmt> members;
  int line = 0;

  friend bool operator==(const PyClass& a, const PyClass& b) {
    return a.name == b.name && a.bases == b.bases && a.methods == b.methods && a.members == b.members;
  }
};

struct PyImport {
  std::string module;                // `import a.b` / `from a.b import ...`
  std::optional<std::string> alias;  // `import x as y`
  std::vector<std::string> names;    // from-import names; empty for plain import
  int line = 0;

  friend bool operator==(const PyImport& a, const PyImport& b) {
    return a.module == b.module && a.alias == b.alias && a.names == b.names;
  }
};

/// Parsed scripting-backend module.
struct ScriptAst {
  std::vector<PyImport> imports;
  std::vector<PyClass> classes;
  std::vector<PyFunction> functions;

  friend bool operator==(const ScriptAst&, const ScriptAst&) = default;
};

/// Throws SyntaxError or UnsupportedConstruct.
ScriptAst parse_compiled_source(std::string_view text);

/// Canonical source text for an AST. Stable, so equal text means equal
/// trees (modulo line numbers).
std::string unparse(const ScriptAst& ast);
std::string unparse(const PyExpr& e);

}  // namespace p2s::transpiler

#include <fmt/format.h>

#include "p2s/transpiler/script_ast.hpp"

namespace p2s::transpiler {

namespace {

using EK = PyExpr::Kind;
using SK = PyStmt::Kind;

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out + "\"";
}

std::string join_exprs(const std::vector<PyExpr>& v, size_t from) {
  std::string out;
  for (size_t i = from; i < v.size(); ++i) {
    if (i > from) out += ", ";
    out += unparse(v[i]);
  }
  return out;
}

void unparse_block(const std::vector<PyStmt>& body, int indent, std::string& out);

void unparse_stmt(const PyStmt& s, int indent, std::string& out) {
  const std::string pad(static_cast<size_t>(indent) * 4, ' ');
  switch (s.kind) {
    case SK::kAssign:
      out += pad + unparse(s.exprs[0]) + " = " + unparse(s.exprs[1]) + "\n";
      break;
    case SK::kAnnAssign:
      out += pad + unparse(s.exprs[0]) + ": " + s.text;
      if (s.exprs.size() > 1) out += " = " + unparse(s.exprs[1]);
      out += "\n";
      break;
    case SK::kAugAssign:
      out += pad + unparse(s.exprs[0]) + " " + s.text + "= " + unparse(s.exprs[1]) + "\n";
      break;
    case SK::kExpr:
      out += pad + unparse(s.exprs[0]) + "\n";
      break;
    case SK::kIf:
      out += pad + "if " + unparse(s.exprs[0]) + ":\n";
      unparse_block(s.body, indent + 1, out);
      if (!s.orelse.empty()) {
        out += pad + "else:\n";
        unparse_block(s.orelse, indent + 1, out);
      }
      break;
    case SK::kWhile:
      out += pad + "while " + unparse(s.exprs[0]) + ":\n";
      unparse_block(s.body, indent + 1, out);
      break;
    case SK::kFor:
      out += pad + "for " + unparse(s.exprs[0]) + " in " + unparse(s.exprs[1]) + ":\n";
      unparse_block(s.body, indent + 1, out);
      break;
    case SK::kReturn:
      out += pad + "return" + (s.exprs.empty() ? "" : " " + unparse(s.exprs[0])) + "\n";
      break;
    case SK::kPass: out += pad + "pass\n"; break;
    case SK::kBreak: out += pad + "break\n"; break;
    case SK::kContinue: out += pad + "continue\n"; break;
  }
}

void unparse_block(const std::vector<PyStmt>& body, int indent, std::string& out) {
  if (body.empty()) {
    out += std::string(static_cast<size_t>(indent) * 4, ' ') + "pass\n";
    return;
  }
  for (const auto& s : body) unparse_stmt(s, indent, out);
}

void unparse_function(const PyFunction& f, int indent, std::string& out) {
  const std::string pad(static_cast<size_t>(indent) * 4, ' ');
  for (const auto& d : f.decorators) out += pad + "@" + d + "\n";
  out += pad + "def " + f.name + "(";
  for (size_t i = 0; i < f.params.size(); ++i) {
    if (i) out += ", ";
    out += f.params[i].name;
    if (f.params[i].annotation) out += ": " + *f.params[i].annotation;
  }
  out += ")";
  if (f.returns) out += " -> " + *f.returns;
  out += ":\n";
  unparse_block(f.body, indent + 1, out);
}

}  // namespace

std::string unparse(const PyExpr& e) {
  switch (e.kind) {
    case EK::kName:
    case EK::kInt:
    case EK::kFloat:
    case EK::kBool:
    case EK::kNone: return e.text;
    case EK::kStr: return quote(e.text);
    case EK::kBinOp:
    case EK::kCompare: return "(" + unparse(e.kids[0]) + " " + e.text + " " + unparse(e.kids[1]) + ")";
    case EK::kBoolOp: return "(" + unparse(e.kids[0]) + " " + e.text + " " + unparse(e.kids[1]) + ")";
    case EK::kUnary: return "(" + e.text + (e.text == "not" ? " " : "") + unparse(e.kids[0]) + ")";
    case EK::kCall: return unparse(e.kids[0]) + "(" + join_exprs(e.kids, 1) + ")";
    case EK::kAttribute: return unparse(e.kids[0]) + "." + e.text;
    case EK::kSubscript: return unparse(e.kids[0]) + "[" + unparse(e.kids[1]) + "]";
    case EK::kTernary:
      return "(" + unparse(e.kids[1]) + " if " + unparse(e.kids[0]) + " else " + unparse(e.kids[2]) + ")";
    case EK::kList: return "[" + join_exprs(e.kids, 0) + "]";
    case EK::kTuple:
      return "(" + join_exprs(e.kids, 0) + (e.kids.size() == 1 ? "," : "") + ")";
  }
  return "?";
}

std::string unparse(const ScriptAst& ast) {
  std::string out;
  for (const auto& imp : ast.imports) {
    if (imp.names.empty()) {
      out += "import " + imp.module + (imp.alias ? " as " + *imp.alias : "") + "\n";
    } else {
      out += "from " + imp.module + " import ";
      for (size_t i = 0; i < imp.names.size(); ++i) out += (i ? ", " : "") + imp.names[i];
      out += "\n";
    }
  }
  for (const auto& c : ast.classes) {
    out += "\nclass " + c.name;
    if (!c.bases.empty()) {
      out += "(";
      for (size_t i = 0; i < c.bases.size(); ++i) out += (i ? ", " : "") + c.bases[i];
      out += ")";
    }
    out += ":\n";
    for (const auto& m : c.members) unparse_stmt(m, 1, out);
    for (const auto& f : c.methods) unparse_function(f, 1, out);
    if (c.members.empty() && c.methods.empty()) out += "    pass\n";
  }
  for (const auto& f : ast.functions) {
    out += "\n";
    unparse_function(f, 0, out);
  }
  return out;
}

}  // namespace p2s::transpiler

#include <algorithm>
#include <set>

#include "p2s/transpiler/transpiler.hpp"

namespace p2s::transpiler {

namespace {

using EK = PyExpr::Kind;
using SK = PyStmt::Kind;

const std::set<std::string, std::less<>> kRuntimeRoots = {"_dafny", "System_"};

bool is_runtime_module(const std::string& module) {
  const std::string root = module.substr(0, module.find('.'));
  const auto& mods = runtime_modules();
  return std::find(mods.begin(), mods.end(), root) != mods.end();
}

bool is_trivial_init(const PyFunction& f) {
  if (f.name != "__init__" || !f.decorators.empty()) return false;
  for (const auto& s : f.body) {
    if (s.kind == SK::kPass) continue;
    if (s.kind == SK::kExpr && s.exprs[0].kind == EK::kStr) continue;
    return false;
  }
  return true;
}

bool is_wrapper(const PyClass& c) {
  for (const auto& b : c.bases) {
    if (b != "object") return false;
  }
  for (const auto& m : c.members) {
    if (m.kind == SK::kPass) continue;
    if (m.kind == SK::kExpr && m.exprs[0].kind == EK::kStr) continue;
    return false;
  }
  for (const auto& f : c.methods) {
    if (is_trivial_init(f)) continue;
    if (f.decorators != std::vector<std::string>{"staticmethod"}) return false;
  }
  return true;
}

// Flattens `a.b.c` into {"a","b","c"}; empty when the chain is not pure names.
std::vector<std::string> attr_chain(const PyExpr& e) {
  if (e.kind == EK::kName) return {e.text};
  if (e.kind != EK::kAttribute) return {};
  auto base = attr_chain(e.kids[0]);
  if (base.empty()) return {};
  base.push_back(e.text);
  return base;
}

class Rewriter {
 public:
  explicit Rewriter(std::set<std::string> wrappers) : wrappers_(std::move(wrappers)) {}

  PyExpr expr(const PyExpr& in) {
    if (in.kind == EK::kAttribute) {
      // module_.default__.F / default__.F -> F
      auto chain = attr_chain(in);
      size_t skip = 0;
      if (chain.size() >= 2 && chain[0] == "module_") skip = 1;
      if (chain.size() == skip + 2 && wrappers_.contains(chain[skip])) return PyExpr::name(chain.back(), in.line);
      if (!chain.empty() && (kRuntimeRoots.contains(chain[0]) || chain[0] == "module_")) {
        std::string n;
        for (size_t i = 0; i < chain.size(); ++i) n += (i ? "." : "") + chain[i];
        throw UnknownRuntimeCall(n);
      }
    }
    if (in.kind == EK::kCall) {
      auto chain = attr_chain(in.kids[0]);
      if (chain.size() == 2 && chain[0] == "_dafny") {
        PyExpr e = in;
        for (size_t i = 1; i < e.kids.size(); ++i) e.kids[i] = expr(e.kids[i]);
        return runtime_call(chain[1], e);
      }
    }
    if (in.kind == EK::kName && kRuntimeRoots.contains(in.text)) throw UnknownRuntimeCall(in.text);
    PyExpr e = in;
    for (auto& k : e.kids) k = expr(k);
    return e;
  }

  PyStmt stmt(const PyStmt& in) {
    PyStmt s = in;
    for (auto& e : s.exprs) e = expr(e);
    for (auto& b : s.body) b = stmt(b);
    for (auto& b : s.orelse) b = stmt(b);
    return s;
  }

  PyFunction function(const PyFunction& in) {
    PyFunction f = in;
    for (auto& s : f.body) s = stmt(s);
    return f;
  }

 private:
  static PyExpr runtime_call(const std::string& helper, const PyExpr& call) {
    const int line = call.line;
    std::vector<PyExpr> args(call.kids.begin() + 1, call.kids.end());
    auto want = [&](size_t n) {
      if (args.size() != n) {
        throw UnsupportedConstruct(line, "_dafny." + helper + " with " + std::to_string(args.size()) + " argument(s)");
      }
    };
    if (helper == "euclidian_division") {
      want(2);
      return PyExpr::binop("//", args[0], args[1], line);
    }
    if (helper == "euclidian_modulus") {
      want(2);
      return PyExpr::binop("%", args[0], args[1], line);
    }
    if (helper == "IntegerRange") {
      want(2);
      return PyExpr::call(PyExpr::name("range", line), args, line);
    }
    if (helper == "Array") {
      if (args.size() < 2) want(2);
      std::vector<PyExpr> dims(args.begin() + 1, args.end());
      return PyExpr::call(PyExpr::attribute(PyExpr::name("np", line), "empty", line), dims, line);
    }
    if (helper == "Seq" || helper == "SeqWithoutIsStrInference") {
      want(1);
      return PyExpr::call(PyExpr::name("list", line), args, line);
    }
    if (helper == "BigRational") {
      if (args.size() == 1) return PyExpr::call(PyExpr::name("float", line), args, line);
      want(2);
      return PyExpr::binop("/", PyExpr::call(PyExpr::name("float", line), {args[0]}, line),
                           PyExpr::call(PyExpr::name("float", line), {args[1]}, line), line);
    }
    throw UnknownRuntimeCall("_dafny." + helper);
  }

  std::set<std::string> wrappers_;
};

}  // namespace

const std::vector<std::string>& runtime_modules() {
  static const std::vector<std::string> kMods = {"_dafny", "System_", "module_", "sys", "typing", "math", "itertools"};
  return kMods;
}

ScriptAst sanitize(const ScriptAst& ast) {
  ScriptAst out;
  for (const auto& imp : ast.imports) {
    if (!is_runtime_module(imp.module)) out.imports.push_back(imp);
  }

  std::set<std::string> wrappers;
  std::vector<PyFunction> hoisted;
  for (const auto& c : ast.classes) {
    if (!is_wrapper(c)) {
      out.classes.push_back(c);
      continue;
    }
    wrappers.insert(c.name);
    for (const auto& f : c.methods) {
      if (is_trivial_init(f)) continue;
      PyFunction g = f;
      g.decorators.clear();
      hoisted.push_back(std::move(g));
    }
  }

  Rewriter rw(std::move(wrappers));
  for (const auto& f : hoisted) out.functions.push_back(rw.function(f));
  for (const auto& f : ast.functions) out.functions.push_back(rw.function(f));
  for (auto& c : out.classes) {
    for (auto& m : c.methods) m = rw.function(m);
  }
  return out;
}

}  // namespace p2s::transpiler

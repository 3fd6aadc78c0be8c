#include <fmt/format.h>

#include <algorithm>
#include <climits>
#include <functional>
#include <map>
#include <regex>
#include <set>

#include "p2s/transpiler/transpiler.hpp"
#include "p2s/util/text.hpp"

namespace p2s::transpiler {

std::string_view to_string(RejectionReason r) {
  switch (r) {
    case RejectionReason::kRecursion: return "RECURSION";
    case RejectionReason::kWhileLoop: return "WHILE_LOOP";
    case RejectionReason::kDynamicAlloc: return "DYNAMIC_ALLOC";
    case RejectionReason::kNonStaticBound: return "NON_STATIC_BOUND";
    case RejectionReason::kUnsupportedType: return "UNSUPPORTED_TYPE";
    case RejectionReason::kNonAffineIndex: return "NON_AFFINE_INDEX";
    case RejectionReason::kUnsupportedCall: return "UNSUPPORTED_CALL";
  }
  return "?";
}

namespace {

using EK = PyExpr::Kind;
using SK = PyStmt::Kind;
using R = RejectionReason;

[[noreturn]] void reject(R r, int line, const std::string& detail) {
  throw Rejected(r, fmt::format("line {}: {}", line, detail));
}

const std::set<std::string, std::less<>> kCKeywords = {
    "auto",   "break",  "case",     "char",   "const",    "continue", "default",  "do",     "double",
    "else",   "enum",   "extern",   "float",  "for",      "goto",     "if",       "inline", "int",
    "long",   "register", "restrict", "return", "short",  "signed",   "sizeof",   "static", "struct",
    "switch", "typedef", "union",   "unsigned", "void",   "volatile", "while",    "main",   "int32_t",
    "bool",   "true",   "false"};

const std::set<std::string, std::less<>> kAllocators = {"list", "dict", "set", "bytearray", "tuple"};

std::string demangle(const std::string& n) {
  static const std::regex kMangled(R"(^d_\d+_(.+)_$)");
  std::smatch m;
  if (std::regex_match(n, m, kMangled)) return m[1].str();
  return n;
}

// Calls to known functions, by name.
void collect_calls(const PyExpr& e, const std::map<std::string, const PyFunction*>& fns, std::set<std::string>& out) {
  if (e.kind == EK::kCall && e.kids[0].kind == EK::kName && fns.contains(e.kids[0].text)) out.insert(e.kids[0].text);
  for (const auto& k : e.kids) collect_calls(k, fns, out);
}

void collect_calls(const std::vector<PyStmt>& body, const std::map<std::string, const PyFunction*>& fns,
                   std::set<std::string>& out) {
  for (const auto& s : body) {
    for (const auto& e : s.exprs) collect_calls(e, fns, out);
    collect_calls(s.body, fns, out);
    collect_calls(s.orelse, fns, out);
  }
}

bool contains_alloc(const PyExpr& e) {
  if (e.kind == EK::kList) return true;
  if (e.kind == EK::kCall) {
    const PyExpr& f = e.kids[0];
    if (f.kind == EK::kName && kAllocators.contains(f.text)) return true;
    if (f.kind == EK::kAttribute && f.text == "empty" && f.kids[0].kind == EK::kName && f.kids[0].text == "np")
      return true;
  }
  return std::any_of(e.kids.begin(), e.kids.end(), contains_alloc);
}

ScalarType parse_scalar_annotation(const std::string& ann, int line) {
  if (ann == "int" || ann == "bool") return ScalarType::kInt32;
  if (ann == "float") return ScalarType::kFloat32;
  reject(R::kUnsupportedType, line, "type annotation '" + ann + "'");
}

// ---- IR utilities ----

void expr_uses(const Expr& e, std::set<std::string>& out) {
  walk_expr(e, [&](const Expr& x) {
    if (x.kind == Expr::Kind::kVar) out.insert(x.name);
  });
}

Expr substitute(const Expr& e, const std::map<std::string, Expr>& subst) {
  if (e.kind == Expr::Kind::kVar) {
    auto it = subst.find(e.name);
    if (it != subst.end()) return it->second;
  }
  Expr out = e;
  for (auto& k : out.kids) k = substitute(k, subst);
  return out;
}

Expr convert(Expr e, ScalarType to) {
  if (e.type == to) return e;
  if (e.kind == Expr::Kind::kIntLit && to == ScalarType::kFloat32) return Expr::float_lit(static_cast<float>(e.ival));
  return Expr::cast(std::move(e), to);
}

Expr truthy(Expr e) {
  if (e.kind == Expr::Kind::kBinOp && (is_comparison(e.op) || e.op == BinOp::kAnd || e.op == BinOp::kOr)) return e;
  if (e.type == ScalarType::kFloat32) return Expr::binop(BinOp::kNe, std::move(e), Expr::float_lit(0.0f));
  return Expr::binop(BinOp::kNe, std::move(e), Expr::int_lit(0));
}

// Drops statements after a return within each block.
bool drop_unreachable(std::vector<Stmt>& body) {
  bool changed = false;
  for (size_t i = 0; i < body.size(); ++i) {
    changed |= drop_unreachable(body[i].body);
    changed |= drop_unreachable(body[i].orelse);
    if (body[i].kind == Stmt::Kind::kReturn && i + 1 < body.size()) {
      body.resize(i + 1);
      changed = true;
      break;
    }
  }
  return changed;
}

// `v = e; return v` -> `return e`.
bool forward_returns(std::vector<Stmt>& body) {
  bool changed = false;
  for (auto& s : body) {
    changed |= forward_returns(s.body);
    changed |= forward_returns(s.orelse);
  }
  for (size_t i = 0; i + 1 < body.size(); ++i) {
    Stmt& a = body[i];
    Stmt& r = body[i + 1];
    if (a.kind == Stmt::Kind::kAssign && r.kind == Stmt::Kind::kReturn && r.exprs.size() == 1 &&
        r.exprs[0].kind == Expr::Kind::kVar && r.exprs[0].name == a.name) {
      Expr value = a.exprs[0];
      r.exprs[0] = convert(std::move(value), r.exprs[0].type);
      body.erase(body.begin() + static_cast<long>(i));
      changed = true;
    }
  }
  return changed;
}

using Live = std::set<std::string>;

// Backward liveness over structured IR; removes dead scalar stores when
// `prune` is set. Returns live-in.
Live liveness(std::vector<Stmt>& body, Live live, bool prune, bool& changed) {
  for (size_t i = body.size(); i-- > 0;) {
    Stmt& s = body[i];
    switch (s.kind) {
      case Stmt::Kind::kReturn:
        live.clear();
        if (!s.exprs.empty()) expr_uses(s.exprs[0], live);
        break;
      case Stmt::Kind::kAssign:
        if (!live.contains(s.name)) {
          if (prune) {
            body.erase(body.begin() + static_cast<long>(i));
            changed = true;
          }
          break;
        }
        live.erase(s.name);
        expr_uses(s.exprs[0], live);
        break;
      case Stmt::Kind::kStore:
        expr_uses(s.exprs[0], live);
        expr_uses(s.exprs[1], live);
        break;
      case Stmt::Kind::kIf: {
        Live t = liveness(s.body, live, prune, changed);
        Live f = liveness(s.orelse, live, prune, changed);
        live = std::move(t);
        live.insert(f.begin(), f.end());
        expr_uses(s.exprs[0], live);
        break;
      }
      case Stmt::Kind::kFor: {
        // Fixpoint: values live around the back edge.
        Live loop = live;
        while (true) {
          bool dummy = false;
          Live in = liveness(s.body, loop, false, dummy);
          in.erase(s.name);
          Live next = live;
          next.insert(in.begin(), in.end());
          if (next == loop) break;
          loop = std::move(next);
        }
        Live in = liveness(s.body, loop, prune, changed);
        in.erase(s.name);
        live = loop;
        live.insert(in.begin(), in.end());
        expr_uses(s.exprs[0], live);
        expr_uses(s.exprs[1], live);
        break;
      }
    }
  }
  return live;
}

void cleanup(std::vector<Stmt>& body) {
  bool changed = true;
  while (changed) {
    changed = drop_unreachable(body);
    changed |= forward_returns(body);
    liveness(body, {}, true, changed);
  }
}

// Straight-line body folded to one expression, for inlining.
std::optional<Expr> as_single_expression(const std::vector<Stmt>& body) {
  std::map<std::string, Expr> env;
  for (const auto& s : body) {
    if (s.kind == Stmt::Kind::kAssign) {
      env[s.name] = substitute(s.exprs[0], env);
    } else if (s.kind == Stmt::Kind::kReturn && s.exprs.size() == 1) {
      return substitute(s.exprs[0], env);
    } else {
      return std::nullopt;
    }
  }
  return std::nullopt;
}

struct Inlinable {
  std::vector<Param> params;
  Expr body;
};

class Lowerer;

struct Shared {
  std::map<std::string, const PyFunction*> fns;
  std::map<std::string, Inlinable> inline_cache;
};

class Lowerer {
 public:
  Lowerer(const PyFunction& fn, Shared& shared, const LowerOptions& opts, bool is_top)
      : fn_(fn), shared_(shared), opts_(opts), is_top_(is_top) {}

  KernelIR run() {
    scan_assignments(fn_.body, 0, 0);
    KernelIR k;
    k.source_name = fn_.name;
    k.name = c_ident(to_snake_case(fn_.name));

    for (const auto& p : fn_.params) {
      Param param;
      param.name = unique_name(p.name);
      auto arr = is_top_ ? opts_.arrays.find(p.name) : opts_.arrays.end();
      if (is_top_ && arr != opts_.arrays.end()) {
        if (!arr->second.is_array() || *arr->second.array_len <= 0) {
          reject(R::kNonStaticBound, fn_.line, "array parameter '" + p.name + "' needs a positive static length");
        }
        param.type = arr->second;
      } else if (auto sc = is_top_ ? opts_.scalars.find(p.name) : opts_.scalars.end();
                 is_top_ && sc != opts_.scalars.end()) {
        param.type.elem = sc->second;
      } else if (p.annotation) {
        param.type.elem = parse_scalar_annotation(*p.annotation, fn_.line);
      }
      vars_[p.name] = {param.name, param.type, true};
      k.params.push_back(param);
    }

    std::vector<Stmt> body = block(fn_.body);
    cleanup(body);

    // Return type from the surviving returns.
    std::optional<ScalarType> ret;
    bool saw_void = false;
    walk_stmts(body, [&](const Stmt& s) {
      if (s.kind != Stmt::Kind::kReturn) return;
      if (s.exprs.empty()) {
        saw_void = true;
      } else if (!ret || s.exprs[0].type == ScalarType::kFloat32) {
        ret = s.exprs[0].type;
      }
    });
    if (ret && saw_void) reject(R::kUnsupportedType, fn_.line, "mixed value and bare returns");
    if (ret) retype_returns(body, *ret);
    k.return_type = ret;

    int loop_no = 0;
    number_loops(body, loop_no);

    std::set<std::string> seen;
    for (const auto& p : k.params) seen.insert(p.name);
    walk_stmts(body, [&](const Stmt& s) {
      if (s.kind == Stmt::Kind::kAssign && !seen.contains(s.name)) {
        seen.insert(s.name);
        k.locals.push_back({s.name, Type{local_types_.at(s.name), std::nullopt}});
      }
    });
    k.body = std::move(body);
    return k;
  }

 private:
  struct VarInfo {
    std::string c_name;
    Type type;
    bool is_param = false;
  };

  std::string c_ident(std::string n) {
    if (kCKeywords.contains(n)) n += "_";
    return n;
  }

  std::string unique_name(const std::string& source) {
    auto it = renamed_.find(source);
    if (it != renamed_.end()) return it->second;
    std::string base = c_ident(demangle(source));
    if (base == to_snake_case(fn_.name)) base += "_v";
    std::string n = base;
    for (int k = 1; used_.contains(n); ++k) n = base + "_" + std::to_string(k);
    used_.insert(n);
    renamed_[source] = n;
    return n;
  }

  // Counts assignments per source name; remembers loop depth of each.
  void scan_assignments(const std::vector<PyStmt>& body, int loop_depth, int cond_depth) {
    for (const auto& s : body) {
      if ((s.kind == SK::kAssign || s.kind == SK::kAnnAssign || s.kind == SK::kAugAssign) &&
          s.exprs[0].kind == EK::kName) {
        if (s.kind == SK::kAnnAssign && s.exprs.size() < 2) continue;
        auto& a = assigns_[s.exprs[0].text];
        ++a.count;
        a.nested = a.nested || loop_depth > 0 || cond_depth > 0;
        if (s.kind == SK::kAugAssign) a.nested = true;
        a.value = s.kind == SK::kAugAssign ? nullptr : &s.exprs.back();
      }
      if (s.kind == SK::kFor && s.exprs[0].kind == EK::kName) {
        auto& a = assigns_[s.exprs[0].text];
        ++a.count;
        a.nested = true;
        a.value = nullptr;
      }
      const bool loop = s.kind == SK::kFor || s.kind == SK::kWhile;
      scan_assignments(s.body, loop_depth + (loop ? 1 : 0), cond_depth + (s.kind == SK::kIf ? 1 : 0));
      scan_assignments(s.orelse, loop_depth, cond_depth + 1);
    }
  }

  // True when `e` has the same value everywhere in the function: literals,
  // never-assigned parameters, and single-assignment locals of such values.
  bool is_static(const PyExpr& e, int depth = 0) const {
    if (depth > 64) return false;
    switch (e.kind) {
      case EK::kInt:
      case EK::kBool: return true;
      case EK::kName: {
        auto a = assigns_.find(e.text);
        auto v = vars_.find(e.text);
        const bool param = v != vars_.end() && v->second.is_param;
        if (a == assigns_.end()) return param && !v->second.type.is_array();
        if (param || a->second.count != 1 || a->second.nested || a->second.value == nullptr) return false;
        return is_static(*a->second.value, depth + 1);
      }
      case EK::kBinOp:
        if (e.text == "/" || e.text == "**") return false;
        return is_static(e.kids[0], depth + 1) && is_static(e.kids[1], depth + 1);
      case EK::kUnary: return e.text != "not" && is_static(e.kids[0], depth + 1);
      case EK::kCall: {
        const PyExpr& f = e.kids[0];
        if (f.kind == EK::kName && f.text == "int" && e.kids.size() == 2) return is_static(e.kids[1], depth + 1);
        // Length of a static array.
        const PyExpr* arr = nullptr;
        if (f.kind == EK::kName && f.text == "len" && e.kids.size() == 2) arr = &e.kids[1];
        if (f.kind == EK::kAttribute && f.text == "length") arr = &f.kids[0];
        if (!arr || arr->kind != EK::kName) return false;
        auto v = vars_.find(arr->text);
        return v != vars_.end() && v->second.type.is_array();
      }
      default: return false;
    }
  }

  std::vector<Stmt> block(const std::vector<PyStmt>& body) {
    std::vector<Stmt> out;
    for (const auto& s : body) stmt(s, out);
    return out;
  }

  void assign_local(const std::string& source, Expr value, std::optional<ScalarType> declared, int line,
                    std::vector<Stmt>& out) {
    auto it = vars_.find(source);
    if (it != vars_.end() && it->second.type.is_array()) reject(R::kUnsupportedType, line, "assignment to array '" + source + "'");
    if (counters_.contains(source)) reject(R::kNonStaticBound, line, "loop counter '" + source + "' assigned in body");
    if (it == vars_.end()) {
      ScalarType t = declared.value_or(value.type);
      VarInfo info{unique_name(source), Type{t, std::nullopt}, false};
      local_types_[info.c_name] = t;
      it = vars_.emplace(source, info).first;
    }
    Stmt s;
    s.kind = Stmt::Kind::kAssign;
    s.name = it->second.c_name;
    s.exprs.push_back(convert(std::move(value), it->second.type.elem));
    out.push_back(std::move(s));
  }

  void store(const PyExpr& target, Expr value, int line, std::vector<Stmt>& out) {
    const PyExpr& base = target.kids[0];
    if (contains_alloc(base)) reject(R::kDynamicAlloc, line, "store into allocated sequence");
    if (base.kind != EK::kName) reject(R::kUnsupportedType, line, "store through '" + unparse(base) + "'");
    const VarInfo& arr = array_param(base.text, line);
    Stmt s;
    s.kind = Stmt::Kind::kStore;
    s.name = arr.c_name;
    s.exprs.push_back(index_expr(target.kids[1], line));
    s.exprs.push_back(convert(std::move(value), arr.type.elem));
    out.push_back(std::move(s));
  }

  const VarInfo& array_param(const std::string& name, int line) {
    auto it = vars_.find(name);
    if (it != vars_.end() && it->second.type.is_array()) return it->second;
    if (it != vars_.end() && it->second.is_param) {
      reject(R::kNonStaticBound, line, "array parameter '" + name + "' has no static length");
    }
    reject(R::kUnsupportedType, line, "subscript of non-array '" + name + "'");
  }

  void stmt(const PyStmt& s, std::vector<Stmt>& out) {
    const int line = s.line;
    switch (s.kind) {
      case SK::kPass: return;
      case SK::kBreak:
      case SK::kContinue: reject(R::kNonStaticBound, line, "early loop exit");
      case SK::kWhile: reject(R::kWhileLoop, line, "while loop");
      case SK::kExpr: {
        const PyExpr& e = s.exprs[0];
        if (e.kind == EK::kStr) return;  // docstring
        if (contains_alloc(e)) reject(R::kDynamicAlloc, line, "allocation");
        if (e.kind == EK::kCall) reject(R::kUnsupportedCall, line, "call statement '" + unparse(e) + "'");
        return;
      }
      case SK::kAssign:
      case SK::kAnnAssign:
      case SK::kAugAssign: {
        const PyExpr& target = s.exprs[0];
        if (s.kind == SK::kAnnAssign && s.exprs.size() < 2) {
          // Bare declaration: type only.
          if (target.kind == EK::kName) declared_[target.text] = parse_scalar_annotation(s.text, line);
          return;
        }
        const PyExpr& rhs = s.exprs[1];
        if (contains_alloc(rhs)) reject(R::kDynamicAlloc, line, "allocation '" + unparse(rhs) + "'");
        Expr value = s.kind == SK::kAugAssign ? expr(PyExpr::binop(s.text, target, rhs, line)) : expr(rhs);
        if (target.kind == EK::kName) {
          std::optional<ScalarType> decl;
          if (s.kind == SK::kAnnAssign) decl = parse_scalar_annotation(s.text, line);
          if (auto d = declared_.find(target.text); !decl && d != declared_.end()) decl = d->second;
          assign_local(target.text, std::move(value), decl, line, out);
        } else if (target.kind == EK::kSubscript) {
          store(target, std::move(value), line, out);
        } else if (target.kind == EK::kTuple) {
          reject(R::kUnsupportedType, line, "tuple assignment");
        } else {
          reject(R::kUnsupportedType, line, "assignment to '" + unparse(target) + "'");
        }
        return;
      }
      case SK::kIf: {
        Stmt st;
        st.kind = Stmt::Kind::kIf;
        st.exprs.push_back(truthy(expr(s.exprs[0])));
        st.body = block(s.body);
        st.orelse = block(s.orelse);
        out.push_back(std::move(st));
        return;
      }
      case SK::kReturn: {
        Stmt st;
        st.kind = Stmt::Kind::kReturn;
        if (!s.exprs.empty()) {
          if (s.exprs[0].kind == EK::kTuple) reject(R::kUnsupportedType, line, "multiple return values");
          if (contains_alloc(s.exprs[0])) reject(R::kDynamicAlloc, line, "allocation in return");
          if (s.exprs[0].kind != EK::kNone) st.exprs.push_back(expr(s.exprs[0]));
        }
        out.push_back(std::move(st));
        return;
      }
      case SK::kFor: for_loop(s, out); return;
    }
  }

  void for_loop(const PyStmt& s, std::vector<Stmt>& out) {
    const int line = s.line;
    const PyExpr& target = s.exprs[0];
    const PyExpr& iter = s.exprs[1];
    if (target.kind != EK::kName) reject(R::kUnsupportedType, line, "loop target '" + unparse(target) + "'");
    const bool is_range = iter.kind == EK::kCall && iter.kids[0].kind == EK::kName && iter.kids[0].text == "range";
    if (!is_range) {
      if (contains_alloc(iter)) reject(R::kDynamicAlloc, line, "iteration over allocated sequence");
      reject(R::kNonStaticBound, line, "loop over '" + unparse(iter) + "'");
    }
    std::vector<PyExpr> args(iter.kids.begin() + 1, iter.kids.end());
    if (args.size() == 3) {
      if (!(args[2].kind == EK::kInt && args[2].ival == 1)) reject(R::kNonStaticBound, line, "range step other than 1");
      args.pop_back();
    }
    if (args.empty() || args.size() > 2) reject(R::kUnsupportedCall, line, "range arity");
    PyExpr lo_py = args.size() == 2 ? args[0] : PyExpr::integer(0, line);
    PyExpr hi_py = args.back();
    for (const PyExpr* b : {&lo_py, &hi_py}) {
      if (!is_static(*b)) reject(R::kNonStaticBound, line, "loop bound '" + unparse(*b) + "' is not static");
    }
    Stmt st;
    st.kind = Stmt::Kind::kFor;
    substitute_static_ = true;
    st.exprs.push_back(convert(expr(lo_py), ScalarType::kInt32));
    st.exprs.push_back(convert(expr(hi_py), ScalarType::kInt32));
    substitute_static_ = false;
    if (st.exprs[0].type != ScalarType::kInt32 || st.exprs[1].type != ScalarType::kInt32) {
      reject(R::kUnsupportedType, line, "non-integer loop bound");
    }
    if (vars_.contains(target.text)) reject(R::kNonStaticBound, line, "loop counter reuses variable '" + target.text + "'");
    st.name = unique_name(target.text);
    counters_[target.text] = st.name;
    st.body = block(s.body);
    counters_.erase(target.text);
    out.push_back(std::move(st));
  }

  // Index expression, checked affine in loop counters.
  Expr index_expr(const PyExpr& py, int line) {
    substitute_static_ = true;
    Expr idx = expr(py);
    substitute_static_ = false;
    if (idx.type != ScalarType::kInt32) reject(R::kUnsupportedType, line, "non-integer index");
    if (!affine(idx).first) reject(R::kNonAffineIndex, line, "index '" + unparse(py) + "'");
    return idx;
  }

  // {is affine, depends on a loop counter}
  std::pair<bool, bool> affine(const Expr& e) const {
    switch (e.kind) {
      case Expr::Kind::kIntLit: return {true, false};
      case Expr::Kind::kVar: {
        for (const auto& [src, c] : counters_) {
          if (c == e.name) return {true, true};
        }
        for (const auto& [src, v] : vars_) {
          if (v.c_name == e.name) return {v.is_param && !assigns_.contains(src), false};
        }
        return {false, false};
      }
      case Expr::Kind::kNeg: return affine(e.kids[0]);
      case Expr::Kind::kCast:
        return e.kids[0].type == ScalarType::kInt32 ? affine(e.kids[0]) : std::pair{false, false};
      case Expr::Kind::kBinOp: {
        auto l = affine(e.kids[0]);
        auto r = affine(e.kids[1]);
        if (!l.first || !r.first) return {false, false};
        if (e.op == BinOp::kAdd || e.op == BinOp::kSub) return {true, l.second || r.second};
        if (e.op == BinOp::kMul) return {!(l.second && r.second), l.second || r.second};
        return {false, false};
      }
      default: return {false, false};
    }
  }

  Expr name_expr(const std::string& n, int line) {
    if (auto c = counters_.find(n); c != counters_.end()) return Expr::var(c->second, ScalarType::kInt32);
    auto it = vars_.find(n);
    if (it != vars_.end()) {
      if (it->second.type.is_array()) reject(R::kUnsupportedType, line, "array '" + n + "' used as a value");
      if (substitute_static_ && !it->second.is_param) {
        auto a = assigns_.find(n);
        if (a != assigns_.end() && a->second.count == 1 && !a->second.nested && a->second.value) {
          return convert(expr(*a->second.value), it->second.type.elem);
        }
      }
      return Expr::var(it->second.c_name, it->second.type.elem);
    }
    if (shared_.fns.contains(n)) reject(R::kUnsupportedCall, line, "function '" + n + "' used as a value");
    throw Error(fmt::format("line {}: undefined name '{}'", line, n));
  }

  Expr arith(const std::string& op, Expr l, Expr r, int line) {
    if (op == "/") {
      return Expr::binop(BinOp::kDiv, convert(std::move(l), ScalarType::kFloat32),
                         convert(std::move(r), ScalarType::kFloat32));
    }
    const bool fl = l.type == ScalarType::kFloat32 || r.type == ScalarType::kFloat32;
    const ScalarType t = fl ? ScalarType::kFloat32 : ScalarType::kInt32;
    l = convert(std::move(l), t);
    r = convert(std::move(r), t);
    if (op == "+") return Expr::binop(BinOp::kAdd, l, r);
    if (op == "-") return Expr::binop(BinOp::kSub, l, r);
    if (op == "*") return Expr::binop(BinOp::kMul, l, r);
    if (op == "//" || op == "%") {
      if (fl) reject(R::kUnsupportedType, line, "floating-point '" + op + "'");
      return op == "//" ? floor_div(l, r) : floor_mod(l, r);
    }
    if (op == "**") {
      auto n = fold_int(r);
      if (!n || *n < 0 || *n > 8) reject(R::kUnsupportedCall, line, "power with non-constant or large exponent");
      if (*n == 0) return fl ? Expr::float_lit(1.0f) : Expr::int_lit(1);
      Expr acc = l;
      for (int i = 1; i < *n; ++i) acc = Expr::binop(BinOp::kMul, acc, l);
      return acc;
    }
    reject(R::kUnsupportedCall, line, "operator '" + op + "'");
  }

  // Flooring division spelled with C truncating ops.
  static Expr floor_div(const Expr& a, const Expr& b) {
    Expr q = Expr::binop(BinOp::kDiv, a, b);
    Expr r = Expr::binop(BinOp::kMod, a, b);
    if (auto c = fold_int(b)) {
      if (*c == 0) return q;
      if (*c == 1) return a;
      return Expr::binop(BinOp::kSub, q, Expr::binop(*c > 0 ? BinOp::kLt : BinOp::kGt, r, Expr::int_lit(0)));
    }
    Expr sign_differs = Expr::binop(BinOp::kNe, Expr::binop(BinOp::kLt, r, Expr::int_lit(0)),
                                    Expr::binop(BinOp::kLt, b, Expr::int_lit(0)));
    Expr fix = Expr::binop(BinOp::kAnd, Expr::binop(BinOp::kNe, r, Expr::int_lit(0)), sign_differs);
    return Expr::binop(BinOp::kSub, q, fix);
  }

  // Result takes the divisor's sign.
  static Expr floor_mod(const Expr& a, const Expr& b) {
    if (auto c = fold_int(b); c && (*c == 1 || *c == -1)) return Expr::int_lit(0);
    return Expr::binop(BinOp::kMod, Expr::binop(BinOp::kAdd, Expr::binop(BinOp::kMod, a, b), b), b);
  }

  Expr call(const PyExpr& e) {
    const int line = e.line;
    const PyExpr& fn = e.kids[0];
    std::vector<PyExpr> args(e.kids.begin() + 1, e.kids.end());
    if (contains_alloc(e)) reject(R::kDynamicAlloc, line, "allocation '" + unparse(e) + "'");
    if (fn.kind == EK::kAttribute) {
      if (fn.text == "length" && fn.kids[0].kind == EK::kName) {
        return Expr::int_lit(*array_param(fn.kids[0].text, line).type.array_len);
      }
      reject(R::kUnsupportedCall, line, "method call '" + unparse(fn) + "'");
    }
    if (fn.kind != EK::kName) reject(R::kUnsupportedCall, line, "call of '" + unparse(fn) + "'");
    const std::string& name = fn.text;
    if (name == "int" || name == "float") {
      if (args.size() != 1) reject(R::kUnsupportedCall, line, name + "() arity");
      const ScalarType to = name == "int" ? ScalarType::kInt32 : ScalarType::kFloat32;
      if (args[0].kind == EK::kStr) {
        try {
          if (to == ScalarType::kFloat32) return Expr::float_lit(std::stof(args[0].text));
          return Expr::int_lit(static_cast<std::int32_t>(std::stol(args[0].text)));
        } catch (const std::exception&) {
          reject(R::kUnsupportedType, line, "bad numeric string");
        }
      }
      return convert(expr(args[0]), to);
    }
    if (name == "len" && args.size() == 1 && args[0].kind == EK::kName) {
      return Expr::int_lit(*array_param(args[0].text, line).type.array_len);
    }
    if (shared_.fns.contains(name)) return inline_call(name, args, line);
    reject(R::kUnsupportedCall, line, "call to '" + name + "'");
  }

  Expr inline_call(const std::string& name, const std::vector<PyExpr>& args, int line) {
    auto it = shared_.inline_cache.find(name);
    if (it == shared_.inline_cache.end()) {
      const PyFunction& callee = *shared_.fns.at(name);
      Lowerer sub(callee, shared_, opts_, false);
      KernelIR k = sub.run();
      auto single = as_single_expression(k.body);
      if (!single) reject(R::kUnsupportedCall, line, "callee '" + name + "' is not a single expression");
      it = shared_.inline_cache.emplace(name, Inlinable{k.params, *single}).first;
    }
    const Inlinable& inl = it->second;
    if (args.size() != inl.params.size()) reject(R::kUnsupportedCall, line, "arity mismatch calling '" + name + "'");
    std::map<std::string, Expr> subst;
    for (size_t i = 0; i < args.size(); ++i) {
      subst[inl.params[i].name] = convert(expr(args[i]), inl.params[i].type.elem);
    }
    return substitute(inl.body, subst);
  }

  Expr expr(const PyExpr& e) {
    const int line = e.line;
    switch (e.kind) {
      case EK::kInt:
        if (e.ival > INT32_MAX || e.ival < INT32_MIN) reject(R::kUnsupportedType, line, "integer literal out of int32 range");
        return Expr::int_lit(static_cast<std::int32_t>(e.ival));
      case EK::kFloat: return Expr::float_lit(static_cast<float>(e.fval));
      case EK::kBool: return Expr::int_lit(e.ival ? 1 : 0);
      case EK::kStr: reject(R::kUnsupportedType, line, "string value");
      case EK::kNone: reject(R::kUnsupportedType, line, "None value");
      case EK::kName: return name_expr(e.text, line);
      case EK::kBinOp: {
        if (e.text == "*" && (e.kids[0].kind == EK::kList || e.kids[1].kind == EK::kList)) {
          reject(R::kDynamicAlloc, line, "sequence repetition");
        }
        return arith(e.text, expr(e.kids[0]), expr(e.kids[1]), line);
      }
      case EK::kUnary: {
        Expr x = expr(e.kids[0]);
        if (e.text == "-") {
          if (x.kind == Expr::Kind::kIntLit && x.ival != INT32_MIN) return Expr::int_lit(-x.ival);
          return Expr::neg(std::move(x));
        }
        if (e.text == "+") return x;
        return Expr::binop(BinOp::kEq, truthy(std::move(x)), Expr::int_lit(0));
      }
      case EK::kCompare: {
        Expr l = expr(e.kids[0]);
        Expr r = expr(e.kids[1]);
        const ScalarType t =
            l.type == ScalarType::kFloat32 || r.type == ScalarType::kFloat32 ? ScalarType::kFloat32 : ScalarType::kInt32;
        static const std::map<std::string, BinOp, std::less<>> kOps = {
            {"<", BinOp::kLt}, {"<=", BinOp::kLe}, {">", BinOp::kGt},
            {">=", BinOp::kGe}, {"==", BinOp::kEq}, {"!=", BinOp::kNe}};
        return Expr::binop(kOps.at(e.text), convert(std::move(l), t), convert(std::move(r), t));
      }
      case EK::kBoolOp:
        return Expr::binop(e.text == "and" ? BinOp::kAnd : BinOp::kOr, truthy(expr(e.kids[0])), truthy(expr(e.kids[1])));
      case EK::kTernary: {
        Expr c = truthy(expr(e.kids[0]));
        Expr a = expr(e.kids[1]);
        Expr b = expr(e.kids[2]);
        const ScalarType t =
            a.type == ScalarType::kFloat32 || b.type == ScalarType::kFloat32 ? ScalarType::kFloat32 : ScalarType::kInt32;
        return Expr::select(std::move(c), convert(std::move(a), t), convert(std::move(b), t));
      }
      case EK::kCall: return call(e);
      case EK::kSubscript: {
        const PyExpr& base = e.kids[0];
        if (contains_alloc(base)) reject(R::kDynamicAlloc, line, "indexing an allocated sequence");
        if (base.kind != EK::kName) reject(R::kUnsupportedType, line, "subscript of '" + unparse(base) + "'");
        const VarInfo& arr = array_param(base.text, line);
        return Expr::index(arr.c_name, index_expr(e.kids[1], line), arr.type.elem);
      }
      case EK::kAttribute: reject(R::kUnsupportedType, line, "attribute '" + unparse(e) + "'");
      case EK::kList: reject(R::kDynamicAlloc, line, "list display");
      case EK::kTuple: reject(R::kUnsupportedType, line, "tuple value");
    }
    reject(R::kUnsupportedType, line, "expression");
  }

  static void retype_returns(std::vector<Stmt>& body, ScalarType t) {
    for (auto& s : body) {
      if (s.kind == Stmt::Kind::kReturn && !s.exprs.empty()) s.exprs[0] = convert(std::move(s.exprs[0]), t);
      retype_returns(s.body, t);
      retype_returns(s.orelse, t);
    }
  }

  static void number_loops(std::vector<Stmt>& body, int& n) {
    for (auto& s : body) {
      if (s.kind == Stmt::Kind::kFor) s.loop_id = "L" + std::to_string(++n);
      number_loops(s.body, n);
      number_loops(s.orelse, n);
    }
  }

  struct AssignInfo {
    int count = 0;
    bool nested = false;
    const PyExpr* value = nullptr;
  };

  const PyFunction& fn_;
  Shared& shared_;
  const LowerOptions& opts_;
  bool is_top_;
  std::map<std::string, AssignInfo> assigns_;
  std::map<std::string, VarInfo> vars_;          // source name -> info
  std::map<std::string, ScalarType> local_types_;  // C name -> type
  std::map<std::string, ScalarType> declared_;
  std::map<std::string, std::string> counters_;  // active loop counters
  std::map<std::string, std::string> renamed_;
  std::set<std::string> used_;
  bool substitute_static_ = false;
};

}  // namespace

namespace {

std::map<std::string, std::set<std::string>> call_graph(const ScriptAst& ast,
                                                        const std::map<std::string, const PyFunction*>& fns) {
  std::map<std::string, std::set<std::string>> calls;
  for (const auto& f : ast.functions) collect_calls(f.body, fns, calls[f.name]);
  return calls;
}

std::map<std::string, const PyFunction*> function_table(const ScriptAst& ast) {
  std::map<std::string, const PyFunction*> fns;
  for (const auto& f : ast.functions) {
    if (!fns.emplace(f.name, &f).second) throw Error("duplicate function '" + f.name + "'");
  }
  if (fns.empty()) throw Error("no function to lower");
  return fns;
}

std::string pick_top(const ScriptAst& ast, const std::map<std::string, const PyFunction*>& fns,
                     const std::map<std::string, std::set<std::string>>& calls,
                     const std::optional<std::string>& requested) {
  if (requested) {
    if (!fns.contains(*requested)) throw Error("top function '" + *requested + "' not found");
    return *requested;
  }
  std::vector<std::string> roots;
  for (const auto& f : ast.functions) {
    bool called = false;
    for (const auto& [caller, callees] : calls) {
      if (caller != f.name && callees.contains(f.name)) called = true;
    }
    if (!called) roots.push_back(f.name);
  }
  if (roots.size() != 1) {
    throw Error(roots.empty() ? "no top function (every function is called)"
                              : "ambiguous top function; set it explicitly");
  }
  return roots.front();
}

}  // namespace

std::string top_function(const ScriptAst& ast, const std::optional<std::string>& requested) {
  auto fns = function_table(ast);
  return pick_top(ast, fns, call_graph(ast, fns), requested);
}

KernelIR lower(const ScriptAst& ast, const LowerOptions& opts) {
  for (const auto& c : ast.classes) {
    reject(R::kUnsupportedType, c.line, "class '" + c.name + "' (heap object)");
  }
  Shared shared;
  shared.fns = function_table(ast);
  auto calls = call_graph(ast, shared.fns);
  const std::string top = pick_top(ast, shared.fns, calls, opts.top);

  // Any cycle reachable from the top is recursion.
  std::map<std::string, int> state;  // 0 new, 1 on stack, 2 done
  std::function<void(const std::string&)> dfs = [&](const std::string& f) {
    state[f] = 1;
    for (const auto& g : calls[f]) {
      if (state[g] == 1) reject(R::kRecursion, shared.fns.at(g)->line, "'" + g + "' is (mutually) recursive");
      if (state[g] == 0) dfs(g);
    }
    state[f] = 2;
  };
  dfs(top);

  Lowerer lw(*shared.fns.at(top), shared, opts, true);
  return lw.run();
}

}  // namespace p2s::transpiler

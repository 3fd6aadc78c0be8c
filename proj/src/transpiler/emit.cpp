#include <fmt/format.h>

#include <climits>
#include <cmath>
#include <set>

#include "p2s/transpiler/transpiler.hpp"

namespace p2s::transpiler {

namespace {

constexpr int kSelectPrec = 0;
constexpr int kUnaryPrec = 7;
constexpr int kPrimaryPrec = 8;

int prec(BinOp op) {
  switch (op) {
    case BinOp::kOr: return 1;
    case BinOp::kAnd: return 2;
    case BinOp::kEq:
    case BinOp::kNe: return 3;
    case BinOp::kLt:
    case BinOp::kLe:
    case BinOp::kGt:
    case BinOp::kGe: return 4;
    case BinOp::kAdd:
    case BinOp::kSub: return 5;
    case BinOp::kMul:
    case BinOp::kDiv:
    case BinOp::kMod: return 6;
  }
  return 0;
}

std::string int_text(std::int32_t v) {
  if (v == INT32_MIN) return "(-2147483647 - 1)";
  return std::to_string(v);
}

std::string float_text(float v) {
  if (std::isnan(v)) return "(0.0f / 0.0f)";
  if (std::isinf(v)) return v > 0 ? "(1.0f / 0.0f)" : "(-1.0f / 0.0f)";
  std::string s = fmt::format("{}", v);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s + "f";
}

int expr_prec(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::kIntLit: return e.ival < 0 ? kUnaryPrec : kPrimaryPrec;
    case Expr::Kind::kFloatLit: return std::signbit(e.fval) ? kUnaryPrec : kPrimaryPrec;
    case Expr::Kind::kVar:
    case Expr::Kind::kIndex: return kPrimaryPrec;
    case Expr::Kind::kNeg:
    case Expr::Kind::kCast: return kUnaryPrec;
    case Expr::Kind::kBinOp: return prec(e.op);
    case Expr::Kind::kSelect: return kSelectPrec;
  }
  return kPrimaryPrec;
}

bool is_logical(const Expr& e) {
  return e.kind == Expr::Kind::kBinOp && (is_comparison(e.op) || e.op == BinOp::kAnd || e.op == BinOp::kOr);
}

std::string expr_text(const Expr& e);

std::string wrap(const Expr& e, bool parens) { return parens ? "(" + expr_text(e) + ")" : expr_text(e); }

std::string expr_text(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::kIntLit: return int_text(e.ival);
    case Expr::Kind::kFloatLit: return float_text(e.fval);
    case Expr::Kind::kVar: return e.name;
    case Expr::Kind::kIndex: return e.name + "[" + expr_text(e.kids[0]) + "]";
    case Expr::Kind::kNeg: return "-" + wrap(e.kids[0], expr_prec(e.kids[0]) <= kUnaryPrec);
    case Expr::Kind::kCast:
      return fmt::format("({}){}", c_type(e.type), wrap(e.kids[0], expr_prec(e.kids[0]) < kPrimaryPrec));
    case Expr::Kind::kSelect:
      return fmt::format("{} ? {} : {}", wrap(e.kids[0], expr_prec(e.kids[0]) <= kSelectPrec),
                         wrap(e.kids[1], expr_prec(e.kids[1]) <= kSelectPrec), expr_text(e.kids[2]));
    case Expr::Kind::kBinOp: {
      const int p = prec(e.op);
      const Expr& l = e.kids[0];
      const Expr& r = e.kids[1];
      // Comparisons nested in comparisons, and mixed && / ||, always get parens.
      const bool cmp = is_comparison(e.op);
      const bool logic = e.op == BinOp::kAnd || e.op == BinOp::kOr;
      auto needs = [&](const Expr& k, bool right) {
        const int kp = expr_prec(k);
        if (k.kind == Expr::Kind::kIntLit && k.ival < 0) return true;
        if (k.kind == Expr::Kind::kFloatLit && std::signbit(k.fval)) return true;
        if (cmp && k.kind == Expr::Kind::kBinOp && is_comparison(k.op)) return true;
        if (logic && is_logical(k) && k.op != e.op) return true;
        return right ? kp <= p : kp < p;
      };
      return fmt::format("{} {} {}", wrap(l, needs(l, false)), c_spelling(e.op), wrap(r, needs(r, true)));
    }
  }
  return "";
}

std::string param_decl(const Param& p) {
  if (p.type.is_array()) return fmt::format("{} {}[{}]", c_type(p.type.elem), p.name, *p.type.array_len);
  return fmt::format("{} {}", c_type(p.type.elem), p.name);
}

std::string signature(const KernelIR& k) {
  std::vector<std::string> ps;
  for (const auto& p : k.params) ps.push_back(param_decl(p));
  const std::string ret = k.return_type ? std::string(c_type(*k.return_type)) : "void";
  return fmt::format("{} {}({})", ret, k.name, ps.empty() ? "void" : fmt::format("{}", fmt::join(ps, ", ")));
}

std::string pragma(const Directive& d) {
  switch (d.kind) {
    case Directive::Kind::kPipeline: return fmt::format("#pragma HLS PIPELINE II={}", d.ii);
    case Directive::Kind::kUnroll: return fmt::format("#pragma HLS UNROLL factor={}", d.factor);
    case Directive::Kind::kArrayPartition:
      return fmt::format("#pragma HLS ARRAY_PARTITION variable={} {} factor={} dim={}", d.target, to_string(d.style),
                         d.factor, d.dim);
  }
  return "";
}

bool mentions(const Stmt& s, const std::string& v) {
  bool hit = s.name == v && s.kind != Stmt::Kind::kStore;
  for (const auto& e : s.exprs) {
    walk_expr(e, [&](const Expr& x) { hit = hit || (x.kind == Expr::Kind::kVar && x.name == v); });
  }
  return hit;
}

class KernelWriter {
 public:
  explicit KernelWriter(const KernelIR& k) : k_(k) {}

  std::string run() {
    out_ += "#include <stdint.h>\n\n";
    out_ += signature(k_) + " {\n";
    for (const auto& d : k_.directives) {
      if (d.kind == Directive::Kind::kArrayPartition) line(1, pragma(d));
    }
    // Locals first touched by a plain top-level assignment are declared there.
    for (const auto& local : k_.locals) {
      const Stmt* first = nullptr;
      walk_stmts(k_.body, [&](const Stmt& s) {
        if (!first && mentions(s, local.name)) first = &s;
      });
      bool top_level = false;
      for (const auto& s : k_.body) top_level = top_level || &s == first;
      bool self_ref = false;
      if (first && first->kind == Stmt::Kind::kAssign) {
        walk_expr(first->exprs[0],
                  [&](const Expr& x) { self_ref = self_ref || (x.kind == Expr::Kind::kVar && x.name == local.name); });
      }
      if (top_level && first->kind == Stmt::Kind::kAssign && first->name == local.name && !self_ref) {
        inline_decl_.insert(first);
      } else {
        const std::string zero = local.type.elem == ScalarType::kFloat32 ? "0.0f" : "0";
        line(1, fmt::format("{} {} = {};", c_type(local.type.elem), local.name, zero));
      }
    }
    block(k_.body, 1);
    out_ += "}\n";
    return out_;
  }

 private:
  void line(int depth, const std::string& text) {
    out_.append(static_cast<size_t>(depth) * 4, ' ');
    out_ += text;
    out_ += '\n';
  }

  ScalarType local_type(const std::string& name) const {
    for (const auto& l : k_.locals) {
      if (l.name == name) return l.type.elem;
    }
    return ScalarType::kInt32;
  }

  void block(const std::vector<Stmt>& body, int depth) {
    for (const auto& s : body) stmt(s, depth);
  }

  void stmt(const Stmt& s, int depth) {
    switch (s.kind) {
      case Stmt::Kind::kAssign:
        if (inline_decl_.contains(&s)) {
          line(depth, fmt::format("{} {} = {};", c_type(local_type(s.name)), s.name, expr_text(s.exprs[0])));
        } else {
          line(depth, fmt::format("{} = {};", s.name, expr_text(s.exprs[0])));
        }
        return;
      case Stmt::Kind::kStore:
        line(depth, fmt::format("{}[{}] = {};", s.name, expr_text(s.exprs[0]), expr_text(s.exprs[1])));
        return;
      case Stmt::Kind::kReturn:
        line(depth, s.exprs.empty() ? "return;" : "return " + expr_text(s.exprs[0]) + ";");
        return;
      case Stmt::Kind::kFor: {
        line(depth, fmt::format("{}: for (int32_t {} = {}; {} < {}; {}++) {{", s.loop_id, s.name,
                                expr_text(s.exprs[0]), s.name, expr_text(s.exprs[1]), s.name));
        for (auto kind : {Directive::Kind::kPipeline, Directive::Kind::kUnroll}) {
          for (const auto& d : k_.directives) {
            if (d.kind == kind && d.target == s.loop_id) line(depth + 1, pragma(d));
          }
        }
        block(s.body, depth + 1);
        line(depth, "}");
        return;
      }
      case Stmt::Kind::kIf: {
        line(depth, "if (" + expr_text(s.exprs[0]) + ") {");
        const Stmt* cur = &s;
        while (true) {
          block(cur->body, depth + 1);
          if (cur->orelse.empty()) break;
          if (cur->orelse.size() == 1 && cur->orelse[0].kind == Stmt::Kind::kIf) {
            cur = &cur->orelse[0];
            line(depth, "} else if (" + expr_text(cur->exprs[0]) + ") {");
            continue;
          }
          line(depth, "} else {");
          block(cur->orelse, depth + 1);
          break;
        }
        line(depth, "}");
        return;
      }
    }
  }

  const KernelIR& k_;
  std::string out_;
  std::set<const Stmt*> inline_decl_;
};

std::string scalar_text(const Value& v) {
  return v.type == ScalarType::kInt32 ? int_text(v.i) : float_text(v.f);
}

std::string array_init(const Value& v) {
  std::vector<std::string> items;
  if (v.type == ScalarType::kInt32) {
    for (auto x : v.ia) items.push_back(int_text(x));
  } else {
    for (auto x : v.fa) items.push_back(float_text(x));
  }
  return fmt::format("{{{}}}", fmt::join(items, ", "));
}

size_t array_size(const Value& v) { return v.type == ScalarType::kInt32 ? v.ia.size() : v.fa.size(); }

std::string printf_spec(ScalarType t) { return t == ScalarType::kInt32 ? "%d" : "%g"; }
std::string printf_arg(ScalarType t, const std::string& e) {
  return t == ScalarType::kInt32 ? "(int)" + e : "(double)" + e;
}

}  // namespace

std::string emit_kernel(const KernelIR& k) { return KernelWriter(k).run(); }

std::string emit_testbench(const KernelIR& k, const VectorSet& vectors) {
  std::string out = "#include <stdint.h>\n#include <stdio.h>\n\n";
  out += signature(k) + ";\n\nint main(void) {\n    int failures = 0;\n";
  for (size_t c = 0; c < vectors.cases.size(); ++c) {
    const TestCase& tc = vectors.cases[c];
    out += "    {\n";
    std::vector<std::string> args;
    for (size_t i = 0; i < k.params.size(); ++i) {
      const Param& p = k.params[i];
      const Value& v = tc.inputs.at(i);
      if (p.type.is_array()) {
        out += fmt::format("        {} {}[{}] = {};\n", c_type(p.type.elem), p.name, *p.type.array_len, array_init(v));
        args.push_back(p.name);
      } else {
        args.push_back(scalar_text(v));
      }
    }
    const std::string call = fmt::format("{}({})", k.name, fmt::join(args, ", "));
    if (k.return_type) {
      out += fmt::format("        {} got = {};\n", c_type(*k.return_type), call);
      if (tc.expected) {
        const ScalarType t = *k.return_type;
        out += fmt::format("        if (got != {}) {{\n", scalar_text(*tc.expected));
        out += fmt::format("            printf(\"case {}: got {}, expected {}\\n\", {});\n", c, printf_spec(t),
                           scalar_text(*tc.expected), printf_arg(t, "got"));
        out += "            failures++;\n        }\n";
      } else {
        out += "        (void)got;\n";
      }
    } else {
      out += "        " + call + ";\n";
    }
    for (const auto& [name, want] : tc.expected_arrays) {
      const ScalarType t = want.type;
      out += fmt::format("        const {} {}_expected[{}] = {};\n", c_type(t), name, array_size(want), array_init(want));
      out += fmt::format("        for (int k = 0; k < {}; k++) {{\n", array_size(want));
      out += fmt::format("            if ({}[k] != {}_expected[k]) {{\n", name, name);
      out += fmt::format("                printf(\"case {}: {}[%d] = {}, expected {}\\n\", k, {}, {});\n", c, name,
                         printf_spec(t), printf_spec(t), printf_arg(t, name + "[k]"),
                         printf_arg(t, name + "_expected[k]"));
      out += "                failures++;\n            }\n        }\n";
    }
    out += "    }\n";
  }
  out += "    if (failures == 0) printf(\"all tests passed\\n\");\n";
  out += "    return failures != 0;\n}\n";
  return out;
}

HlsSources emit_hls(const KernelIR& k, const VectorSet& vectors) {
  return {emit_kernel(k), emit_testbench(k, vectors)};
}

}  // namespace p2s::transpiler

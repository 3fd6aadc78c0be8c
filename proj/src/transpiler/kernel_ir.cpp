#include "json.hpp"
#include "p2s/transpiler/kernel_ir.hpp"

namespace p2s::transpiler {

using nlohmann::ordered_json;

std::string_view to_string(ScalarType t) { return t == ScalarType::kInt32 ? "int32" : "float32"; }
std::string_view c_type(ScalarType t) { return t == ScalarType::kInt32 ? "int32_t" : "float"; }

std::string_view c_spelling(BinOp op) {
  switch (op) {
    case BinOp::kAdd: return "+";
    case BinOp::kSub: return "-";
    case BinOp::kMul: return "*";
    case BinOp::kDiv: return "/";
    case BinOp::kMod: return "%";
    case BinOp::kLt: return "<";
    case BinOp::kLe: return "<=";
    case BinOp::kGt: return ">";
    case BinOp::kGe: return ">=";
    case BinOp::kEq: return "==";
    case BinOp::kNe: return "!=";
    case BinOp::kAnd: return "&&";
    case BinOp::kOr: return "||";
  }
  return "?";
}

bool is_comparison(BinOp op) {
  return op == BinOp::kLt || op == BinOp::kLe || op == BinOp::kGt || op == BinOp::kGe || op == BinOp::kEq ||
         op == BinOp::kNe;
}

std::string_view to_string(PartitionStyle s) {
  switch (s) {
    case PartitionStyle::kCyclic: return "cyclic";
    case PartitionStyle::kBlock: return "block";
    case PartitionStyle::kComplete: return "complete";
  }
  return "?";
}

PartitionStyle parse_partition_style(std::string_view s) {
  if (s == "cyclic") return PartitionStyle::kCyclic;
  if (s == "block") return PartitionStyle::kBlock;
  if (s == "complete") return PartitionStyle::kComplete;
  throw ConfigError("unknown partition style '" + std::string(s) + "'");
}

std::string_view to_string(Directive::Kind k) {
  switch (k) {
    case Directive::Kind::kPipeline: return "PIPELINE";
    case Directive::Kind::kUnroll: return "UNROLL";
    case Directive::Kind::kArrayPartition: return "ARRAY_PARTITION";
  }
  return "?";
}

Directive::Kind parse_directive_kind(std::string_view s) {
  if (s == "PIPELINE") return Directive::Kind::kPipeline;
  if (s == "UNROLL") return Directive::Kind::kUnroll;
  if (s == "ARRAY_PARTITION") return Directive::Kind::kArrayPartition;
  throw ConfigError("unknown directive kind '" + std::string(s) + "'");
}

Expr Expr::int_lit(std::int32_t v) {
  Expr e;
  e.kind = Kind::kIntLit;
  e.ival = v;
  return e;
}

Expr Expr::float_lit(float v) {
  Expr e;
  e.kind = Kind::kFloatLit;
  e.type = ScalarType::kFloat32;
  e.fval = v;
  return e;
}

Expr Expr::var(std::string n, ScalarType t) {
  Expr e;
  e.kind = Kind::kVar;
  e.type = t;
  e.name = std::move(n);
  return e;
}

Expr Expr::index(std::string array, Expr idx, ScalarType t) {
  Expr e;
  e.kind = Kind::kIndex;
  e.type = t;
  e.name = std::move(array);
  e.kids.push_back(std::move(idx));
  return e;
}

Expr Expr::binop(BinOp op, Expr l, Expr r) {
  Expr e;
  e.kind = Kind::kBinOp;
  e.op = op;
  const bool logical = is_comparison(op) || op == BinOp::kAnd || op == BinOp::kOr;
  e.type = logical ? ScalarType::kInt32 : l.type;
  e.kids.push_back(std::move(l));
  e.kids.push_back(std::move(r));
  return e;
}

Expr Expr::neg(Expr x) {
  Expr e;
  e.kind = Kind::kNeg;
  e.type = x.type;
  e.kids.push_back(std::move(x));
  return e;
}

Expr Expr::cast(Expr x, ScalarType to) {
  Expr e;
  e.kind = Kind::kCast;
  e.type = to;
  e.kids.push_back(std::move(x));
  return e;
}

Expr Expr::select(Expr c, Expr a, Expr b) {
  Expr e;
  e.kind = Kind::kSelect;
  e.type = a.type;
  e.kids.push_back(std::move(c));
  e.kids.push_back(std::move(a));
  e.kids.push_back(std::move(b));
  return e;
}

std::optional<std::int64_t> fold_int(const Expr& e) {
  if (e.type != ScalarType::kInt32) return std::nullopt;
  switch (e.kind) {
    case Expr::Kind::kIntLit: return e.ival;
    case Expr::Kind::kNeg: {
      auto v = fold_int(e.kids[0]);
      if (!v) return std::nullopt;
      return -*v;
    }
    case Expr::Kind::kBinOp: {
      auto l = fold_int(e.kids[0]);
      auto r = fold_int(e.kids[1]);
      if (!l || !r) return std::nullopt;
      switch (e.op) {
        case BinOp::kAdd: return *l + *r;
        case BinOp::kSub: return *l - *r;
        case BinOp::kMul: return *l * *r;
        case BinOp::kDiv: return *r == 0 ? std::nullopt : std::optional<std::int64_t>(*l / *r);
        case BinOp::kMod: return *r == 0 ? std::nullopt : std::optional<std::int64_t>(*l % *r);
        case BinOp::kLt: return *l < *r;
        case BinOp::kLe: return *l <= *r;
        case BinOp::kGt: return *l > *r;
        case BinOp::kGe: return *l >= *r;
        case BinOp::kEq: return *l == *r;
        case BinOp::kNe: return *l != *r;
        case BinOp::kAnd: return *l && *r;
        case BinOp::kOr: return *l || *r;
      }
      return std::nullopt;
    }
    case Expr::Kind::kSelect: {
      auto c = fold_int(e.kids[0]);
      if (!c) return std::nullopt;
      return fold_int(e.kids[*c ? 1 : 2]);
    }
    default: return std::nullopt;
  }
}

namespace {

ordered_json type_json(const Type& t) {
  ordered_json j{{"elem", to_string(t.elem)}};
  if (t.array_len) j["length"] = *t.array_len;
  return j;
}

ordered_json expr_json(const Expr& e) {
  ordered_json j;
  switch (e.kind) {
    case Expr::Kind::kIntLit: return ordered_json{{"int", e.ival}};
    case Expr::Kind::kFloatLit: return ordered_json{{"float", e.fval}};
    case Expr::Kind::kVar: return ordered_json{{"var", e.name}};
    case Expr::Kind::kIndex: return ordered_json{{"index", e.name}, {"at", expr_json(e.kids[0])}};
    case Expr::Kind::kBinOp:
      return ordered_json{{"op", c_spelling(e.op)}, {"lhs", expr_json(e.kids[0])}, {"rhs", expr_json(e.kids[1])}};
    case Expr::Kind::kNeg: return ordered_json{{"neg", expr_json(e.kids[0])}};
    case Expr::Kind::kCast: return ordered_json{{"cast", to_string(e.type)}, {"of", expr_json(e.kids[0])}};
    case Expr::Kind::kSelect:
      return ordered_json{
          {"select", expr_json(e.kids[0])}, {"then", expr_json(e.kids[1])}, {"else", expr_json(e.kids[2])}};
  }
  return j;
}

ordered_json stmts_json(const std::vector<Stmt>& body) {
  ordered_json arr = ordered_json::array();
  for (const auto& s : body) {
    switch (s.kind) {
      case Stmt::Kind::kAssign:
        arr.push_back({{"assign", s.name}, {"value", expr_json(s.exprs[0])}});
        break;
      case Stmt::Kind::kStore:
        arr.push_back({{"store", s.name}, {"at", expr_json(s.exprs[0])}, {"value", expr_json(s.exprs[1])}});
        break;
      case Stmt::Kind::kFor:
        arr.push_back({{"for", s.loop_id},
                       {"counter", s.name},
                       {"lo", expr_json(s.exprs[0])},
                       {"hi", expr_json(s.exprs[1])},
                       {"body", stmts_json(s.body)}});
        break;
      case Stmt::Kind::kIf:
        arr.push_back({{"if", expr_json(s.exprs[0])}, {"then", stmts_json(s.body)}, {"else", stmts_json(s.orelse)}});
        break;
      case Stmt::Kind::kReturn:
        arr.push_back({{"return", s.exprs.empty() ? ordered_json(nullptr) : expr_json(s.exprs[0])}});
        break;
    }
  }
  return arr;
}

}  // namespace

std::string to_json(const KernelIR& k) {
  ordered_json params = ordered_json::array();
  for (const auto& p : k.params) params.push_back({{"name", p.name}, {"type", type_json(p.type)}});
  ordered_json locals = ordered_json::array();
  for (const auto& p : k.locals) locals.push_back({{"name", p.name}, {"type", type_json(p.type)}});
  ordered_json dirs = ordered_json::array();
  for (const auto& d : k.directives) {
    ordered_json j{{"kind", to_string(d.kind)}, {"target", d.target}};
    if (d.kind == Directive::Kind::kPipeline) j["ii"] = d.ii;
    if (d.kind != Directive::Kind::kPipeline) j["factor"] = d.factor;
    if (d.kind == Directive::Kind::kArrayPartition) {
      j["style"] = to_string(d.style);
      j["dim"] = d.dim;
    }
    dirs.push_back(std::move(j));
  }
  ordered_json doc{{"name", k.name},
                   {"source_name", k.source_name},
                   {"params", params},
                   {"return_type", k.return_type ? ordered_json(to_string(*k.return_type)) : ordered_json("void")},
                   {"locals", locals},
                   {"body", stmts_json(k.body)},
                   {"directives", dirs}};
  return doc.dump(2) + "\n";
}

}  // namespace p2s::transpiler

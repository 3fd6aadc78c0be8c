#include <fmt/format.h>

#include <climits>
#include <cmath>
#include <map>

#include "p2s/transpiler/transpiler.hpp"

namespace p2s::transpiler {

namespace {

struct Scalar {
  ScalarType type = ScalarType::kInt32;
  std::int32_t i = 0;
  float f = 0.0f;
};

std::int32_t wrap(std::int64_t v) { return static_cast<std::int32_t>(static_cast<std::uint32_t>(v)); }

std::int32_t to_int(float f) {
  if (std::isnan(f) || f >= 2147483648.0f || f < -2147483648.0f) return INT32_MIN;
  return static_cast<std::int32_t>(f);
}

class Machine {
 public:
  explicit Machine(const KernelIR& k) : k_(k) {}

  InterpretResult run(const std::vector<Value>& inputs) {
    if (inputs.size() != k_.params.size()) {
      throw Error(fmt::format("{} expects {} inputs, got {}", k_.name, k_.params.size(), inputs.size()));
    }
    for (size_t i = 0; i < inputs.size(); ++i) {
      const Param& p = k_.params[i];
      Value v = inputs[i];
      if (p.type.is_array()) {
        const size_t n = v.type == ScalarType::kInt32 ? v.ia.size() : v.fa.size();
        if (!v.is_array || v.type != p.type.elem || n != static_cast<size_t>(*p.type.array_len)) {
          throw Error("input for '" + p.name + "' does not match its array type");
        }
        arrays_[p.name] = std::move(v);
      } else {
        if (v.is_array) throw Error("input for '" + p.name + "' must be a scalar");
        Scalar s{p.type.elem, 0, 0.0f};
        if (p.type.elem == ScalarType::kInt32) {
          s.i = v.type == ScalarType::kInt32 ? v.i : to_int(v.f);
        } else {
          s.f = v.type == ScalarType::kFloat32 ? v.f : static_cast<float>(v.i);
        }
        scalars_[p.name] = s;
      }
    }
    for (const auto& l : k_.locals) scalars_[l.name] = Scalar{l.type.elem, 0, 0.0f};
    exec(k_.body);
    InterpretResult r;
    if (k_.return_type) {
      if (!returned_) throw Error(k_.name + " finished without returning a value");
      r.ret = *k_.return_type == ScalarType::kInt32 ? Value::int32(ret_.i) : Value::float32(ret_.f);
    }
    for (const auto& p : k_.params) {
      if (p.type.is_array()) r.arrays[p.name] = arrays_.at(p.name);
    }
    return r;
  }

 private:
  void exec(const std::vector<Stmt>& body) {
    for (const auto& s : body) {
      if (returned_) return;
      switch (s.kind) {
        case Stmt::Kind::kAssign: {
          Scalar v = eval(s.exprs[0]);
          Scalar& dst = scalars_[s.name];
          if (dst.type == ScalarType::kInt32) {
            dst.i = v.type == ScalarType::kInt32 ? v.i : to_int(v.f);
          } else {
            dst.f = v.type == ScalarType::kFloat32 ? v.f : static_cast<float>(v.i);
          }
          break;
        }
        case Stmt::Kind::kStore: {
          Value& arr = arrays_.at(s.name);
          const std::int32_t idx = eval(s.exprs[0]).i;
          check_bounds(arr, idx, s.name);
          Scalar v = eval(s.exprs[1]);
          if (arr.type == ScalarType::kInt32) {
            arr.ia[static_cast<size_t>(idx)] = v.type == ScalarType::kInt32 ? v.i : to_int(v.f);
          } else {
            arr.fa[static_cast<size_t>(idx)] = v.type == ScalarType::kFloat32 ? v.f : static_cast<float>(v.i);
          }
          break;
        }
        case Stmt::Kind::kReturn:
          if (!s.exprs.empty()) ret_ = eval(s.exprs[0]);
          returned_ = true;
          return;
        case Stmt::Kind::kIf:
          exec(eval(s.exprs[0]).i != 0 ? s.body : s.orelse);
          break;
        case Stmt::Kind::kFor: {
          const std::int32_t lo = eval(s.exprs[0]).i;
          Scalar& counter = scalars_[s.name];
          counter = Scalar{ScalarType::kInt32, lo, 0.0f};
          while (!returned_ && scalars_[s.name].i < eval(s.exprs[1]).i) {
            exec(s.body);
            if (returned_) break;
            Scalar& c = scalars_[s.name];
            c.i = wrap(static_cast<std::int64_t>(c.i) + 1);
          }
          break;
        }
      }
    }
  }

  static void check_bounds(const Value& arr, std::int32_t idx, const std::string& name) {
    const size_t n = arr.type == ScalarType::kInt32 ? arr.ia.size() : arr.fa.size();
    if (idx < 0 || static_cast<size_t>(idx) >= n) {
      throw EvaluationError(EvaluationError::Kind::kOutOfBounds, fmt::format("{}[{}] with length {}", name, idx, n));
    }
  }

  Scalar eval(const Expr& e) {
    switch (e.kind) {
      case Expr::Kind::kIntLit: return {ScalarType::kInt32, e.ival, 0.0f};
      case Expr::Kind::kFloatLit: return {ScalarType::kFloat32, 0, e.fval};
      case Expr::Kind::kVar: {
        auto it = scalars_.find(e.name);
        if (it == scalars_.end()) throw Error("unbound variable '" + e.name + "'");
        return it->second;
      }
      case Expr::Kind::kIndex: {
        const Value& arr = arrays_.at(e.name);
        const std::int32_t idx = eval(e.kids[0]).i;
        check_bounds(arr, idx, e.name);
        if (arr.type == ScalarType::kInt32) return {ScalarType::kInt32, arr.ia[static_cast<size_t>(idx)], 0.0f};
        return {ScalarType::kFloat32, 0, arr.fa[static_cast<size_t>(idx)]};
      }
      case Expr::Kind::kNeg: {
        Scalar v = eval(e.kids[0]);
        if (v.type == ScalarType::kInt32) return {ScalarType::kInt32, wrap(-static_cast<std::int64_t>(v.i)), 0.0f};
        return {ScalarType::kFloat32, 0, -v.f};
      }
      case Expr::Kind::kCast: {
        Scalar v = eval(e.kids[0]);
        if (e.type == ScalarType::kInt32) return {ScalarType::kInt32, v.type == ScalarType::kInt32 ? v.i : to_int(v.f), 0.0f};
        return {ScalarType::kFloat32, 0, v.type == ScalarType::kFloat32 ? v.f : static_cast<float>(v.i)};
      }
      case Expr::Kind::kSelect:
        return eval(e.kids[0]).i != 0 ? eval(e.kids[1]) : eval(e.kids[2]);
      case Expr::Kind::kBinOp: return binop(e);
    }
    throw Error("bad expression");
  }

  Scalar binop(const Expr& e) {
    if (e.op == BinOp::kAnd) {
      if (eval(e.kids[0]).i == 0) return {ScalarType::kInt32, 0, 0.0f};
      return {ScalarType::kInt32, eval(e.kids[1]).i != 0 ? 1 : 0, 0.0f};
    }
    if (e.op == BinOp::kOr) {
      if (eval(e.kids[0]).i != 0) return {ScalarType::kInt32, 1, 0.0f};
      return {ScalarType::kInt32, eval(e.kids[1]).i != 0 ? 1 : 0, 0.0f};
    }
    const Scalar l = eval(e.kids[0]);
    const Scalar r = eval(e.kids[1]);
    if (l.type == ScalarType::kFloat32 || r.type == ScalarType::kFloat32) {
      const float a = l.type == ScalarType::kFloat32 ? l.f : static_cast<float>(l.i);
      const float b = r.type == ScalarType::kFloat32 ? r.f : static_cast<float>(r.i);
      auto flag = [](bool x) { return Scalar{ScalarType::kInt32, x ? 1 : 0, 0.0f}; };
      switch (e.op) {
        case BinOp::kAdd: return {ScalarType::kFloat32, 0, a + b};
        case BinOp::kSub: return {ScalarType::kFloat32, 0, a - b};
        case BinOp::kMul: return {ScalarType::kFloat32, 0, a * b};
        case BinOp::kDiv: return {ScalarType::kFloat32, 0, a / b};
        case BinOp::kMod: return {ScalarType::kFloat32, 0, std::fmod(a, b)};
        case BinOp::kLt: return flag(a < b);
        case BinOp::kLe: return flag(a <= b);
        case BinOp::kGt: return flag(a > b);
        case BinOp::kGe: return flag(a >= b);
        case BinOp::kEq: return flag(a == b);
        case BinOp::kNe: return flag(a != b);
        default: break;
      }
      throw Error("bad float operator");
    }
    const std::int64_t a = l.i;
    const std::int64_t b = r.i;
    auto val = [](std::int64_t x) { return Scalar{ScalarType::kInt32, wrap(x), 0.0f}; };
    switch (e.op) {
      case BinOp::kAdd: return val(a + b);
      case BinOp::kSub: return val(a - b);
      case BinOp::kMul: return val(a * b);
      case BinOp::kDiv:
      case BinOp::kMod:
        if (b == 0) throw EvaluationError(EvaluationError::Kind::kDivByZero, fmt::format("{} {} 0", a, c_spelling(e.op)));
        return val(e.op == BinOp::kDiv ? a / b : a % b);
      case BinOp::kLt: return val(a < b);
      case BinOp::kLe: return val(a <= b);
      case BinOp::kGt: return val(a > b);
      case BinOp::kGe: return val(a >= b);
      case BinOp::kEq: return val(a == b);
      case BinOp::kNe: return val(a != b);
      default: break;
    }
    throw Error("bad int operator");
  }

  const KernelIR& k_;
  std::map<std::string, Scalar> scalars_;
  std::map<std::string, Value> arrays_;
  Scalar ret_;
  bool returned_ = false;
};

}  // namespace

InterpretResult interpret(const KernelIR& k, const std::vector<Value>& inputs) { return Machine(k).run(inputs); }

}  // namespace p2s::transpiler

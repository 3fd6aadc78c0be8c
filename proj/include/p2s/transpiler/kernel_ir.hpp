#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "p2s/util/error.hpp"

namespace p2s::transpiler {

enum class ScalarType { kInt32, kFloat32 };

std::string_view to_string(ScalarType t);
/// C spelling: int32_t / float.
std::string_view c_type(ScalarType t);

struct Type {
  ScalarType elem = ScalarType::kInt32;
  std::optional<int> array_len;  // set for static arrays

  bool is_array() const { return array_len.has_value(); }
  friend bool operator==(const Type&, const Type&) = default;
};

enum class BinOp { kAdd, kSub, kMul, kDiv, kMod, kLt, kLe, kGt, kGe, kEq, kNe, kAnd, kOr };

std::string_view c_spelling(BinOp op);
bool is_comparison(BinOp op);

/// Division and modulo have C semantics (truncation toward zero); any
/// flooring from the source language is spelled out with explicit ops.
struct Expr {
  enum class Kind { kIntLit, kFloatLit, kVar, kIndex, kBinOp, kNeg, kCast, kSelect };
  Kind kind = Kind::kIntLit;
  ScalarType type = ScalarType::kInt32;
  BinOp op = BinOp::kAdd;
  std::int32_t ival = 0;
  float fval = 0.0f;
  std::string name;  // Var name, Index array name
  // Index: {index}. BinOp: {lhs, rhs}. Neg/Cast: {operand}. Select: {cond, then, else}.
  std::vector<Expr> kids;

  friend bool operator==(const Expr&, const Expr&) = default;

  static Expr int_lit(std::int32_t v);
  static Expr float_lit(float v);
  static Expr var(std::string n, ScalarType t);
  static Expr index(std::string array, Expr idx, ScalarType t);
  static Expr binop(BinOp op, Expr l, Expr r);
  static Expr neg(Expr e);
  static Expr cast(Expr e, ScalarType to);
  static Expr select(Expr c, Expr a, Expr b);
};

struct Stmt {
  enum class Kind { kAssign, kStore, kFor, kIf, kReturn };
  Kind kind = Kind::kReturn;
  std::string name;     // Assign target, Store array, For counter
  std::string loop_id;  // For only: "L1", "L2", ... in pre-order
  // Assign: {value}. Store: {index, value}. For: {lo, hi} (counter runs lo..hi-1).
  // If: {cond}. Return: {} or {value}.
  std::vector<Expr> exprs;
  std::vector<Stmt> body;
  std::vector<Stmt> orelse;

  friend bool operator==(const Stmt&, const Stmt&) = default;
};

struct Param {
  std::string name;
  Type type;
  friend bool operator==(const Param&, const Param&) = default;
};

enum class PartitionStyle { kCyclic, kBlock, kComplete };
std::string_view to_string(PartitionStyle s);
PartitionStyle parse_partition_style(std::string_view s);

struct Directive {
  enum class Kind { kPipeline, kUnroll, kArrayPartition };
  Kind kind = Kind::kPipeline;
  std::string target;  // loop id, or array name for ARRAY_PARTITION
  int ii = 1;
  int factor = 1;
  int dim = 1;
  PartitionStyle style = PartitionStyle::kCyclic;

  friend bool operator==(const Directive&, const Directive&) = default;
};
std::string_view to_string(Directive::Kind k);
Directive::Kind parse_directive_kind(std::string_view s);

struct KernelIR {
  std::string name;  // C function name
  std::string source_name;
  std::vector<Param> params;
  std::optional<ScalarType> return_type;  // none: void, results in arrays
  std::vector<Param> locals;              // scalars, in first-assignment order
  std::vector<Stmt> body;
  std::vector<Directive> directives;

  friend bool operator==(const KernelIR&, const KernelIR&) = default;
};

/// Pretty JSON dump of the kernel (debug artifact).
std::string to_json(const KernelIR& k);

/// Visits every statement, pre-order.
template <typename F>
void walk_stmts(const std::vector<Stmt>& body, F&& f) {
  for (const auto& s : body) {
    f(s);
    walk_stmts(s.body, f);
    walk_stmts(s.orelse, f);
  }
}

template <typename F>
void walk_expr(const Expr& e, F&& f) {
  f(e);
  for (const auto& k : e.kids) walk_expr(k, f);
}

/// Constant value of an int expression built from literals, if any.
std::optional<std::int64_t> fold_int(const Expr& e);

}  // namespace p2s::transpiler

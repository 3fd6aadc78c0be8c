#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "p2s/gateway/prompt.hpp"
#include "p2s/transpiler/kernel_ir.hpp"
#include "p2s/transpiler/script_ast.hpp"

namespace p2s::transpiler {

// ---- sanitize ----

class UnknownRuntimeCall : public Error {
 public:
  explicit UnknownRuntimeCall(std::string name)
      : Error("no rewrite for runtime call '" + name + "'"), name_(std::move(name)) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

/// Module names whose imports are dropped.
const std::vector<std::string>& runtime_modules();

/// Drops runtime imports, hoists static functions out of wrapper classes,
/// and rewrites runtime helper calls into plain expressions:
///   _dafny.euclidian_division(a, b) -> a // b
///   _dafny.euclidian_modulus(a, b)  -> a % b
///   _dafny.IntegerRange(a, b)       -> range(a, b)
///   _dafny.Array(init, n)           -> np.empty(n)
///   _dafny.Seq(x), SeqWithoutIsStrInference(x) -> list(x)
///   _dafny.BigRational(x)           -> float(x)
///   _dafny.BigRational(a, b)        -> float(a) / float(b)
ScriptAst sanitize(const ScriptAst& ast);

// ---- lower ----

enum class RejectionReason {
  kRecursion,
  kWhileLoop,
  kDynamicAlloc,
  kNonStaticBound,
  kUnsupportedType,
  kNonAffineIndex,
  kUnsupportedCall,
};
std::string_view to_string(RejectionReason r);

class Rejected : public Error {
 public:
  Rejected(RejectionReason reason, const std::string& detail)
      : Error("rejected (" + std::string(to_string(reason)) + "): " + detail), reason_(reason) {}
  RejectionReason reason() const { return reason_; }

 private:
  RejectionReason reason_;
};

struct LowerOptions {
  /// Entry function; default is the unique function no other function calls.
  std::optional<std::string> top;
  /// Static shapes for array parameters, by source parameter name.
  std::map<std::string, Type> arrays;
  /// Scalar parameter types by source name; unannotated default is int32.
  std::map<std::string, ScalarType> scalars;
};

KernelIR lower(const ScriptAst& sanitized, const LowerOptions& opts = {});

/// The entry function `lower` would pick.
std::string top_function(const ScriptAst& sanitized, const std::optional<std::string>& requested = std::nullopt);

// ---- annotate ----

class InvalidDirectiveTarget : public Error {
 public:
  explicit InvalidDirectiveTarget(const std::string& target)
      : Error("invalid directive target '" + target + "'"), target_(target) {}
  const std::string& target() const { return target_; }

 private:
  std::string target_;
};

struct DirectivePolicy {
  bool defaults = true;
  int max_unroll_trip = 8;
  int pipeline_ii = 1;
  /// Replace the default directive with the same (kind, target), or add.
  std::vector<Directive> overrides;
};

KernelIR annotate(const KernelIR& kernel, const DirectivePolicy& policy = {});

// ---- emit ----

struct Value {
  ScalarType type = ScalarType::kInt32;
  bool is_array = false;
  std::int32_t i = 0;
  float f = 0.0f;
  std::vector<std::int32_t> ia;
  std::vector<float> fa;

  static Value int32(std::int32_t v) { return {ScalarType::kInt32, false, v, 0.0f, {}, {}}; }
  static Value float32(float v) { return {ScalarType::kFloat32, false, 0, v, {}, {}}; }
  friend bool operator==(const Value&, const Value&) = default;
};

struct TestCase {
  std::vector<Value> inputs;
  /// Return value, or for void kernels the final contents of the array
  /// parameters keyed by name.
  std::optional<Value> expected;
  std::map<std::string, Value> expected_arrays;
};

struct VectorSet {
  std::vector<TestCase> cases;
};

/// Parses `{"cases": [{"in": [...], "out": ...}]}` against the kernel's
/// parameter types.
VectorSet parse_vectors(const std::string& json_text, const KernelIR& kernel);
VectorSet load_vectors(const std::filesystem::path& path, const KernelIR& kernel);
/// Array shapes implied by the first case, keyed by the top function's
/// parameter names (positional match).
std::map<std::string, Type> array_specs_from_vectors(const std::string& json_text,
                                                     const std::vector<std::string>& param_names);

struct HlsSources {
  std::string kernel;
  std::string testbench;
};

std::string emit_kernel(const KernelIR& k);
std::string emit_testbench(const KernelIR& k, const VectorSet& vectors);
HlsSources emit_hls(const KernelIR& k, const VectorSet& vectors);

// ---- interpret ----

class EvaluationError : public Error {
 public:
  enum class Kind { kDivByZero, kOutOfBounds };
  EvaluationError(Kind kind, const std::string& detail)
      : Error(std::string(kind == Kind::kDivByZero ? "DIV_BY_ZERO" : "OUT_OF_BOUNDS") + ": " + detail),
        kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct InterpretResult {
  std::optional<Value> ret;
  std::map<std::string, Value> arrays;  // final array-parameter contents
};

/// Executes with C semantics: wrapping int32, float32, truncating division.
InterpretResult interpret(const KernelIR& k, const std::vector<Value>& inputs);

// ---- compile backend ----

enum class CompileMode { kReal, kFixture };
CompileMode parse_compile_mode(std::string_view s);

struct CompileConfig {
  CompileMode mode = CompileMode::kFixture;
  std::string dafny_binary = "dafny";
  int timeout_s = 120;
  /// FIXTURE: directory holding `<task_id>.py`.
  std::filesystem::path fixture_dir;
};

class CompileFailed : public Error {
 public:
  using Error::Error;
};

/// Dafny source -> scripting-backend module text. REAL runs
/// `dafny build --target:py`; FIXTURE looks up a committed emission.
std::string compile_to_script(const gateway::CandidateSource& dafny_source, const std::string& task_id,
                              const CompileConfig& cfg);

// ---- pipeline ----

struct TranspileOptions {
  LowerOptions lower;
  DirectivePolicy directives;
  std::optional<std::string> vectors_json;
};

struct TranspileResult {
  ScriptAst parsed;
  ScriptAst sanitized;
  KernelIR kernel;  // annotated
  HlsSources sources;
  std::string ir_json;
};

/// parse -> sanitize -> lower -> annotate -> emit. Errors propagate.
TranspileResult transpile(std::string_view script_text, const TranspileOptions& opts);

/// Writes `<name>.c`, `<name>_tb.c`, `<name>.ir.json` into `dir`.
void write_outputs(const TranspileResult& r, const std::filesystem::path& dir);

}  // namespace p2s::transpiler

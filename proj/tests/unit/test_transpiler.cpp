#include <cmath>
#include <cstdlib>

#include "doctest.h"
#include "json.hpp"
#include "p2s/transpiler/transpiler.hpp"
#include "p2s/util/rng.hpp"
#include "p2s/util/subprocess.hpp"
#include "p2s/util/text.hpp"
#include "support.hpp"

using namespace p2s;
using namespace p2s::transpiler;

namespace {

std::string compiled(const std::string& id) { return read_file(testing::data_dir() / "compiled" / (id + ".py")); }
std::string golden(const std::string& name) { return read_file(testing::data_dir() / "golden" / name); }

TranspileResult run(const std::string& id) {
  TranspileOptions opts;
  const auto v = testing::data_dir() / "vectors" / (id + ".vectors.json");
  if (std::filesystem::exists(v)) opts.vectors_json = read_file(v);
  return transpile(compiled(id), opts);
}

// Wraps method bodies in the shape the Dafny Python backend emits.
std::string module(const std::string& methods) {
  return "import _dafny as _dafny\nimport module_ as module_\n\nclass default__:\n    def  __init__(self):\n"
         "        pass\n\n" +
         methods;
}

RejectionReason rejection_of(const std::string& script, LowerOptions opts = {}) {
  try {
    lower(sanitize(parse_compiled_source(script)), opts);
  } catch (const Rejected& r) {
    return r.reason();
  }
  FAIL("expected a rejection");
  return RejectionReason::kUnsupportedCall;
}

std::int32_t call_int(const KernelIR& k, std::vector<Value> in) {
  auto r = interpret(k, in);
  REQUIRE(r.ret.has_value());
  return r.ret->i;
}

std::int64_t py_floordiv(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t py_mod(std::int64_t a, std::int64_t b) { return a - b * py_floordiv(a, b); }

}  // namespace

TEST_CASE("benchmark kernels match committed goldens") {
  for (auto [id, name] : {std::pair{"t001", "cube"}, {"t002", "triangle_number"},
                          {"t003", "triangular_prism_volume"}, {"t004", "sum_array"}}) {
    auto r = run(id);
    CHECK(r.kernel.name == name);
    CHECK(r.sources.kernel == golden(std::string(name) + ".c"));
    CHECK(r.sources.testbench == golden(std::string(name) + "_tb.c"));
    // Emission is a pure function of its input.
    CHECK(run(id).sources.kernel == r.sources.kernel);
  }
}

TEST_CASE("interpreter agrees with closed forms") {
  Rng rng(1234);
  const auto cube = run("t001").kernel;
  const auto tri = run("t002").kernel;
  const auto prism = run("t003").kernel;
  const auto sum = run("t004").kernel;
  for (int i = 0; i < 1000; ++i) {
    const std::int64_t n = static_cast<std::int64_t>(rng.below(2581)) - 1290;  // |n^3| < 2^31
    CHECK(call_int(cube, {Value::int32(static_cast<std::int32_t>(n))}) == n * n * n);

    const std::int64_t m = static_cast<std::int64_t>(rng.below(5001));
    CHECK(call_int(tri, {Value::int32(static_cast<std::int32_t>(m))}) == m * (m + 1) / 2);

    const std::int64_t b = 1 + static_cast<std::int64_t>(rng.below(1000));
    const std::int64_t h = 1 + static_cast<std::int64_t>(rng.below(1000));
    const std::int64_t l = 1 + static_cast<std::int64_t>(rng.below(1000));
    CHECK(call_int(prism, {Value::int32(static_cast<std::int32_t>(b)), Value::int32(static_cast<std::int32_t>(h)),
                           Value::int32(static_cast<std::int32_t>(l))}) == b * h * l / 2);

    Value arr;
    arr.is_array = true;
    std::int64_t expect = 0;
    for (int k = 0; k < 8; ++k) {
      const auto x = static_cast<std::int32_t>(rng.below(200001)) - 100000;
      arr.ia.push_back(x);
      expect += x;
    }
    CHECK(call_int(sum, {arr}) == expect);
  }
}

TEST_CASE("generated C compiles and agrees with the interpreter") {
  if (!find_executable("cc")) return;
  testing::TempDir tmp;
  for (const char* id : {"t001", "t002", "t003", "t004"}) {
    auto r = run(id);
    write_outputs(r, tmp / id);
    const auto dir = tmp / id;
    const auto exe = dir / "tb";
    auto build = run_process({"cc", "-std=c99", "-o", exe.string(), (dir / (r.kernel.name + ".c")).string(),
                              (dir / (r.kernel.name + "_tb.c")).string()},
                             std::chrono::seconds(60));
    REQUIRE_MESSAGE(build.exit_code == 0, build.output);
    auto tb = run_process({exe.string()}, std::chrono::seconds(10));
    CHECK(tb.exit_code == 0);
    CHECK(tb.output.find("all tests passed") != std::string::npos);
    CHECK(std::filesystem::exists(dir / (r.kernel.name + ".ir.json")));
  }
}

TEST_CASE("rejections") {
  CHECK(rejection_of(compiled("t005")) == RejectionReason::kRecursion);
  CHECK(rejection_of(compiled("t006")) == RejectionReason::kWhileLoop);
  CHECK(rejection_of(module("    @staticmethod\n    def Make(n):\n        a = _dafny.Array(None, n)\n"
                            "        return a[0]\n")) == RejectionReason::kDynamicAlloc);
  CHECK(rejection_of(module("    @staticmethod\n    def Make(n):\n        xs = [1, 2, 3]\n"
                            "        return xs[0]\n")) == RejectionReason::kDynamicAlloc);
  CHECK(rejection_of(module("    @staticmethod\n    def Even(n):\n        if (n) == (0):\n            return True\n"
                            "        return default__.Odd((n) - (1))\n\n"
                            "    @staticmethod\n    def Odd(n):\n        if (n) == (0):\n            return False\n"
                            "        return default__.Even((n) - (1))\n\n"
                            "    @staticmethod\n    def Top(n):\n        return default__.Even(n)\n")) ==
        RejectionReason::kRecursion);
  CHECK(rejection_of(compiled("t004")) == RejectionReason::kNonStaticBound);
  LowerOptions opts;
  opts.arrays["a"] = Type{ScalarType::kInt32, 8};
  CHECK(rejection_of(module("    @staticmethod\n    def Idx(a, n):\n        s = 0\n"
                            "        for i in _dafny.IntegerRange(0, 8):\n            s = (s) + ((a)[(i) * (i)])\n"
                            "        return s\n"),
                     opts) == RejectionReason::kNonAffineIndex);
  CHECK(rejection_of(module("    @staticmethod\n    def S(n):\n        s: str = \"x\"\n        return n\n")) ==
        RejectionReason::kUnsupportedType);
}

TEST_CASE("runtime helpers are rewritten and unknown ones fail") {
  auto ast = sanitize(parse_compiled_source(
      module("    @staticmethod\n    def D(a, b):\n        return _dafny.euclidian_division(a, b)\n")));
  CHECK(unparse(ast).find("//") != std::string::npos);
  CHECK(unparse(ast).find("_dafny") == std::string::npos);
  CHECK_THROWS_AS(sanitize(parse_compiled_source(
                      module("    @staticmethod\n    def D(a):\n        return _dafny.Mystery(a)\n"))),
                  UnknownRuntimeCall);
}

TEST_CASE("floor division and modulo keep flooring semantics") {
  auto k = lower(sanitize(parse_compiled_source(module(
      "    @staticmethod\n    def Q(a, b):\n        return _dafny.euclidian_division(a, b)\n\n"
      "    @staticmethod\n    def R(a, b):\n        return _dafny.euclidian_modulus(a, b)\n\n"
      "    @staticmethod\n    def Both(a, b):\n        return (default__.Q(a, b)) * (1000) + (default__.R(a, b))\n"))));
  auto q3 = lower(sanitize(parse_compiled_source(
      module("    @staticmethod\n    def Q3(a):\n        return _dafny.euclidian_division(a, 3)\n"))));
  Rng rng(77);
  for (int i = 0; i < 2000; ++i) {
    const std::int64_t a = static_cast<std::int64_t>(rng.below(2001)) - 1000;
    std::int64_t b = static_cast<std::int64_t>(rng.below(41)) - 20;
    if (b == 0) b = 7;
    const std::int64_t expect = py_floordiv(a, b) * 1000 + py_mod(a, b);
    CHECK(call_int(k, {Value::int32(static_cast<std::int32_t>(a)), Value::int32(static_cast<std::int32_t>(b))}) ==
          expect);
    CHECK(call_int(q3, {Value::int32(static_cast<std::int32_t>(a))}) == py_floordiv(a, 3));
  }
  CHECK_THROWS_AS(interpret(k, {Value::int32(1), Value::int32(0)}), EvaluationError);
}

TEST_CASE("interpreter wraps like int32") {
  auto k = lower(sanitize(parse_compiled_source(
      module("    @staticmethod\n    def M(a, b):\n        return (a) * (b)\n"))));
  CHECK(call_int(k, {Value::int32(65536), Value::int32(65536)}) == 0);
  CHECK(call_int(k, {Value::int32(2147483647), Value::int32(2)}) == -2);
}

TEST_CASE("parser errors") {
  CHECK_THROWS_AS(parse_compiled_source("def f(:\n  return 1\n"), SyntaxError);
  CHECK_THROWS_AS(parse_compiled_source("def f():\n    return 'abc\n"), SyntaxError);
  CHECK_THROWS_AS(parse_compiled_source("def f():\n    return f\"x\"\n"), UnsupportedConstruct);
  CHECK_THROWS_AS(transpile("", {}), Error);
}

TEST_CASE("directives: defaults, overrides and bad targets") {
  auto base = run("t002").kernel;
  REQUIRE(base.directives.size() == 1);
  CHECK(base.directives[0].kind == Directive::Kind::kPipeline);
  CHECK(base.directives[0].target == "L1");

  DirectivePolicy pol;
  Directive d;
  d.kind = Directive::Kind::kPipeline;
  d.target = "L1";
  d.ii = 2;
  pol.overrides.push_back(d);
  auto k2 = annotate(base, pol);
  REQUIRE(k2.directives.size() == 1);
  CHECK(k2.directives[0].ii == 2);
  CHECK(emit_kernel(k2).find("#pragma HLS PIPELINE II=2") != std::string::npos);

  DirectivePolicy off;
  off.defaults = false;
  CHECK(annotate(base, off).directives.empty());

  DirectivePolicy bad;
  d.target = "L9";
  bad.overrides.push_back(d);
  CHECK_THROWS_AS(annotate(base, bad), InvalidDirectiveTarget);

  auto sum = run("t004").kernel;
  bool partition = false, unroll = false;
  for (const auto& x : sum.directives) {
    partition = partition || (x.kind == Directive::Kind::kArrayPartition && x.target == "a" && x.factor == 8);
    unroll = unroll || (x.kind == Directive::Kind::kUnroll && x.factor == 8);
  }
  CHECK(partition);
  CHECK(unroll);
}

TEST_CASE("test vectors are validated against the signature") {
  auto k = run("t001").kernel;
  CHECK_THROWS_AS(parse_vectors(R"({"cases":[{"in":[1,2],"out":1}]})", k), ConfigError);
  CHECK_THROWS_AS(parse_vectors(R"({"cases":[{"in":[4294967296],"out":1}]})", k), ConfigError);
  CHECK_THROWS_AS(parse_vectors(R"({"nope":[]})", k), ConfigError);
  auto vs = parse_vectors(R"({"cases":[{"in":[3],"out":27},{"in":[2]}]})", k);
  REQUIRE(vs.cases.size() == 2);
  CHECK(vs.cases[0].expected->i == 27);
  CHECK_FALSE(vs.cases[1].expected.has_value());
  auto shapes = array_specs_from_vectors(read_file(testing::data_dir() / "vectors/t004.vectors.json"), {"a"});
  CHECK(shapes.at("a") == Type{ScalarType::kInt32, 8});
}

TEST_CASE("fixture compile backend") {
  CompileConfig cfg;
  cfg.mode = CompileMode::kFixture;
  cfg.fixture_dir = testing::data_dir() / "compiled";
  auto src = gateway::CandidateSource::from_text("method Cube(n: int) returns (r: int) { r := n * n * n; }");
  CHECK(compile_to_script(src, "t001", cfg) == compiled("t001"));
  CHECK_THROWS_AS(compile_to_script(src, "t999", cfg), CompileFailed);
  CHECK_THROWS_AS(compile_to_script(gateway::CandidateSource::empty(), "t001", cfg), CompileFailed);
  CHECK_THROWS(parse_compile_mode("MAGIC"));
}

TEST_CASE("ir json is well formed") {
  auto r = run("t002");
  auto j = nlohmann::json::parse(r.ir_json);
  CHECK(j["name"] == "triangle_number");
}

#include "p2s/transpiler/transpiler.hpp"
#include "p2s/util/text.hpp"

namespace p2s::transpiler {

TranspileResult transpile(std::string_view script_text, const TranspileOptions& opts) {
  TranspileResult r;
  r.parsed = parse_compiled_source(script_text);
  r.sanitized = sanitize(r.parsed);

  LowerOptions lo = opts.lower;
  if (opts.vectors_json) {
    const std::string top = top_function(r.sanitized, lo.top);
    std::vector<std::string> names;
    for (const auto& f : r.sanitized.functions) {
      if (f.name != top) continue;
      for (const auto& p : f.params) names.push_back(p.name);
    }
    for (auto& [name, type] : array_specs_from_vectors(*opts.vectors_json, names)) lo.arrays.try_emplace(name, type);
  }
  r.kernel = annotate(lower(r.sanitized, lo), opts.directives);
  VectorSet vectors;
  if (opts.vectors_json) vectors = parse_vectors(*opts.vectors_json, r.kernel);
  r.sources = emit_hls(r.kernel, vectors);
  r.ir_json = to_json(r.kernel);
  return r;
}

void write_outputs(const TranspileResult& r, const std::filesystem::path& dir) {
  const std::string& n = r.kernel.name;
  write_file(dir / (n + ".c"), r.sources.kernel);
  write_file(dir / (n + "_tb.c"), r.sources.testbench);
  write_file(dir / (n + ".ir.json"), r.ir_json);
}

}  // namespace p2s::transpiler

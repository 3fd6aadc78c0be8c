#include <fmt/format.h>

#include <algorithm>
#include <climits>

#include "json.hpp"
#include "p2s/transpiler/transpiler.hpp"
#include "p2s/util/text.hpp"

namespace p2s::transpiler {

using nlohmann::json;

namespace {

std::int32_t to_i32(const json& v, const std::string& where) {
  if (!v.is_number_integer()) throw ConfigError(where + ": expected an integer");
  const auto x = v.get<std::int64_t>();
  if (x < INT32_MIN || x > INT32_MAX) throw ConfigError(where + ": integer out of int32 range");
  return static_cast<std::int32_t>(x);
}

float to_f32(const json& v, const std::string& where) {
  if (!v.is_number()) throw ConfigError(where + ": expected a number");
  return v.get<float>();
}

Value to_value(const json& v, const Type& t, const std::string& where) {
  Value out;
  out.type = t.elem;
  if (!t.is_array()) {
    if (t.elem == ScalarType::kInt32) {
      out.i = to_i32(v, where);
    } else {
      out.f = to_f32(v, where);
    }
    return out;
  }
  if (!v.is_array() || v.size() != static_cast<size_t>(*t.array_len)) {
    throw ConfigError(fmt::format("{}: expected an array of length {}", where, *t.array_len));
  }
  out.is_array = true;
  for (size_t i = 0; i < v.size(); ++i) {
    const std::string w = fmt::format("{}[{}]", where, i);
    if (t.elem == ScalarType::kInt32) {
      out.ia.push_back(to_i32(v[i], w));
    } else {
      out.fa.push_back(to_f32(v[i], w));
    }
  }
  return out;
}

}  // namespace

VectorSet parse_vectors(const std::string& json_text, const KernelIR& kernel) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad test vectors: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("cases") || !doc["cases"].is_array()) {
    throw ConfigError("test vectors need a \"cases\" array");
  }
  VectorSet vs;
  for (size_t c = 0; c < doc["cases"].size(); ++c) {
    const json& jc = doc["cases"][c];
    const std::string where = fmt::format("case {}", c);
    if (!jc.contains("in") || !jc["in"].is_array() || jc["in"].size() != kernel.params.size()) {
      throw ConfigError(fmt::format("{}: \"in\" must list {} values", where, kernel.params.size()));
    }
    TestCase tc;
    for (size_t i = 0; i < kernel.params.size(); ++i) {
      tc.inputs.push_back(to_value(jc["in"][i], kernel.params[i].type, where + " " + kernel.params[i].name));
    }
    if (jc.contains("out") && !jc["out"].is_null()) {
      const json& out = jc["out"];
      if (out.is_object()) {
        for (const auto& [name, v] : out.items()) {
          auto p = std::find_if(kernel.params.begin(), kernel.params.end(),
                                [&](const Param& q) { return q.name == name && q.type.is_array(); });
          if (p == kernel.params.end()) throw ConfigError(where + ": no array parameter '" + name + "'");
          tc.expected_arrays[name] = to_value(v, p->type, where + " out " + name);
        }
      } else {
        if (!kernel.return_type) throw ConfigError(where + ": void kernel needs an object \"out\"");
        tc.expected = to_value(out, Type{*kernel.return_type, std::nullopt}, where + " out");
      }
    }
    vs.cases.push_back(std::move(tc));
  }
  return vs;
}

VectorSet load_vectors(const std::filesystem::path& path, const KernelIR& kernel) {
  return parse_vectors(read_file(path), kernel);
}

std::map<std::string, Type> array_specs_from_vectors(const std::string& json_text,
                                                     const std::vector<std::string>& param_names) {
  std::map<std::string, Type> out;
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad test vectors: ") + e.what());
  }
  if (!doc.contains("cases") || !doc["cases"].is_array() || doc["cases"].empty()) return out;
  const json& in = doc["cases"][0].value("in", json::array());
  for (size_t i = 0; i < in.size() && i < param_names.size(); ++i) {
    if (!in[i].is_array()) continue;
    Type t;
    t.array_len = static_cast<int>(in[i].size());
    for (const auto& x : in[i]) {
      if (!x.is_number_integer()) t.elem = ScalarType::kFloat32;
    }
    out[param_names[i]] = t;
  }
  return out;
}

}  // namespace p2s::transpiler

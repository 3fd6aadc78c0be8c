#include "p2s/synth/synth.hpp"
#include "toml.hpp"

namespace p2s::synth {

namespace fs = std::filesystem;

namespace {

MockTable::Entry parse_entry(const toml::table& t, const fs::path& base, const std::string& where) {
  MockTable::Entry e;
  if (auto b = t["bundle"].value<std::string>()) e.bundle_dir = base / *b;
  if (auto f = t["failure"].value<std::string>()) e.failure = *f;
  if (e.bundle_dir.has_value() == e.failure.has_value()) {
    throw ConfigError("mock entry " + where + " needs exactly one of 'bundle' or 'failure'");
  }
  e.elapsed_s = t["elapsed_s"].value_or(e.elapsed_s);
  if (auto m = t["peak_memory_mb"].value<double>()) e.peak_memory_mb = *m;
  return e;
}

}  // namespace

MockTable MockTable::load(const fs::path& path) {
  toml::table doc;
  try {
    doc = toml::parse_file(path.string());
  } catch (const toml::parse_error& e) {
    throw ConfigError("bad mock table " + path.string() + ": " + std::string(e.description()));
  }
  const fs::path base = path.parent_path();
  MockTable table;
  if (auto* d = doc["default"].as_table()) table.fallback_ = parse_entry(*d, base, "[default]");
  if (auto* ks = doc["kernels"].as_table()) {
    for (auto&& [key, node] : *ks) {
      auto* t = node.as_table();
      if (!t) throw ConfigError("mock entry kernels." + std::string(key.str()) + " must be a table");
      table.entries_[std::string(key.str())] = parse_entry(*t, base, "kernels." + std::string(key.str()));
    }
  }
  return table;
}

const MockTable::Entry* MockTable::lookup(const std::string& kernel_hash) const {
  auto it = entries_.find(kernel_hash);
  if (it != entries_.end()) return &it->second;
  return fallback_ ? &*fallback_ : nullptr;
}

}  // namespace p2s::synth

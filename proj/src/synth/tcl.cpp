#include <fmt/format.h>

#include <cmath>

#include "p2s/synth/synth.hpp"

namespace p2s::synth {

ToolMode parse_tool_mode(std::string_view s) {
  if (s == "REAL" || s == "real") return ToolMode::kReal;
  if (s == "MOCK" || s == "mock") return ToolMode::kMock;
  throw ConfigError("unknown synth tool mode '" + std::string(s) + "'");
}

std::string_view to_string(ToolMode m) { return m == ToolMode::kReal ? "REAL" : "MOCK"; }

std::string_view to_string(SynthStatus s) {
  switch (s) {
    case SynthStatus::kSynthesized: return "SYNTHESIZED";
    case SynthStatus::kParseFail: return "PARSE_FAIL";
    case SynthStatus::kSynthFail: return "SYNTH_FAIL";
    case SynthStatus::kTimeout: return "TIMEOUT";
  }
  return "?";
}

void SynthConfig::validate() const {
  if (part.empty()) throw ConfigError("synth.part must be non-empty");
  if (!(clock_period_ns > 0.0) || !std::isfinite(clock_period_ns)) {
    throw ConfigError("synth.clock_period_ns must be positive");
  }
  if (tool_timeout_s <= 0) throw ConfigError("synth.tool_timeout_s must be positive");
}

std::string render_tcl(const SynthConfig& cfg, const std::filesystem::path& kernel_file,
                       const std::filesystem::path& tb_file) {
  const std::string top = cfg.top_function.empty() ? kernel_file.stem().string() : cfg.top_function;
  std::string s;
  s += "open_project -reset proj\n";
  s += fmt::format("set_top {}\n", top);
  s += fmt::format("add_files {{{}}}\n", kernel_file.string());
  s += fmt::format("add_files -tb {{{}}}\n", tb_file.string());
  s += "open_solution -reset solution1\n";
  s += fmt::format("set_part {{{}}}\n", cfg.part);
  s += fmt::format("create_clock -period {} -name default\n", cfg.clock_period_ns);
  s += "csynth_design\n";
  s += "exit\n";
  return s;
}

}  // namespace p2s::synth

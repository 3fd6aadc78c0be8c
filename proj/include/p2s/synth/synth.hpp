#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "p2s/util/error.hpp"

namespace p2s::synth {

enum class ToolMode { kReal, kMock };
ToolMode parse_tool_mode(std::string_view s);
std::string_view to_string(ToolMode m);

struct SynthConfig {
  std::string part = "xc7z020clg484-1";
  double clock_period_ns = 10.0;
  std::string top_function;  // empty: kernel file stem
  ToolMode tool_mode = ToolMode::kMock;
  int tool_timeout_s = 1800;
  /// MOCK: fixture table (`mock_reports.toml`).
  std::filesystem::path mock_table;

  void validate() const;
};

enum class SynthStatus { kSynthesized, kParseFail, kSynthFail, kTimeout };
std::string_view to_string(SynthStatus s);

struct SynthesisReport {
  SynthStatus status = SynthStatus::kParseFail;
  std::optional<double> latency_ns;
  std::optional<int> initiation_interval;
  std::optional<long> luts;
  std::optional<long> dsps;
  std::optional<long> ffs;
  double elapsed_s = 0.0;
  std::optional<double> peak_memory_mb;
  std::optional<std::string> failure_detail;
  // Raw figures behind latency_ns.
  std::optional<long> latency_cycles_best;
  std::optional<long> latency_cycles_worst;
  std::optional<double> estimated_clock_ns;
};

/// Report files by file name, plus how the tool run ended.
struct RawReportBundle {
  std::map<std::string, std::string> files;
  std::optional<std::string> tool_failure;
  bool timed_out = false;

  static RawReportBundle from_directory(const std::filesystem::path& dir);
};

struct SynthRun {
  RawReportBundle bundle;
  double elapsed_s = 0.0;
  std::optional<double> peak_memory_mb;
};

std::string render_tcl(const SynthConfig& cfg, const std::filesystem::path& kernel_file,
                       const std::filesystem::path& tb_file);

/// Canned outcomes keyed by SHA-256 of the kernel source.
class MockTable {
 public:
  struct Entry {
    std::optional<std::filesystem::path> bundle_dir;
    std::optional<std::string> failure;
    double elapsed_s = 30.0;
    std::optional<double> peak_memory_mb;
  };

  static MockTable load(const std::filesystem::path& path);

  /// Entry for `kernel_hash`, else the `[default]` entry, else nullopt.
  const Entry* lookup(const std::string& kernel_hash) const;
  void add(const std::string& kernel_hash, Entry e) { entries_[kernel_hash] = std::move(e); }

 private:
  std::map<std::string, Entry> entries_;
  std::optional<Entry> fallback_;
};

/// REAL: runs the HLS tool on `script` inside `work_dir` (P2S_HLS_BIN, then
/// vitis_hls, then vivado_hls). MOCK: returns the canned bundle for the
/// kernel's hash.
SynthRun run_synthesis(const std::string& script, const SynthConfig& cfg, const std::string& kernel_source,
                       const std::filesystem::path& work_dir);

/// Never throws; malformed input gives PARSE_FAIL.
SynthesisReport parse_report(const RawReportBundle& bundle, const SynthConfig& cfg);

/// render -> run -> parse for one kernel/testbench pair on disk.
SynthesisReport synthesize(const SynthConfig& cfg, const std::filesystem::path& kernel_file,
                           const std::filesystem::path& tb_file, const std::filesystem::path& work_dir);

}  // namespace p2s::synth

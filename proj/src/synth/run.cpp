#include <fmt/format.h>

#include <cstdlib>

#include "p2s/synth/synth.hpp"
#include "p2s/util/sha256.hpp"
#include "p2s/util/subprocess.hpp"
#include "p2s/util/text.hpp"

namespace p2s::synth {

namespace fs = std::filesystem;

RawReportBundle RawReportBundle::from_directory(const fs::path& dir) {
  RawReportBundle b;
  if (!fs::is_directory(dir)) return b;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file()) b.files[e.path().filename().string()] = read_file(e.path());
  }
  return b;
}

namespace {

std::string find_tool() {
  if (const char* env = std::getenv("P2S_HLS_BIN"); env && *env) {
    if (!find_executable(env)) throw ToolNotFound(env);
    return env;
  }
  for (const char* name : {"vitis_hls", "vivado_hls"}) {
    if (find_executable(name)) return name;
  }
  throw ToolNotFound("vitis_hls");
}

std::string tail(const std::string& s, size_t n) { return s.size() <= n ? s : s.substr(s.size() - n); }

SynthRun run_real(const std::string& script, const SynthConfig& cfg, const fs::path& work_dir) {
  const std::string tool = find_tool();
  fs::create_directories(work_dir);
  write_file(work_dir / "run_hls.tcl", script);
  ProcessResult r = run_process({tool, "-f", "run_hls.tcl"}, std::chrono::seconds(cfg.tool_timeout_s), work_dir);
  SynthRun out;
  out.elapsed_s = static_cast<double>(r.wall_ms) / 1000.0;
  out.peak_memory_mb = r.peak_rss_mb;
  if (r.timed_out) {
    out.bundle.timed_out = true;
    return out;
  }
  out.bundle = RawReportBundle::from_directory(work_dir / "proj" / "solution1" / "syn" / "report");
  if (r.exit_code != 0) out.bundle.tool_failure = fmt::format("exit code {}: {}", r.exit_code, tail(r.output, 2000));
  return out;
}

}  // namespace

SynthRun run_synthesis(const std::string& script, const SynthConfig& cfg, const std::string& kernel_source,
                       const fs::path& work_dir) {
  cfg.validate();
  if (cfg.tool_mode == ToolMode::kReal) return run_real(script, cfg, work_dir);

  const MockTable table = MockTable::load(cfg.mock_table);
  const std::string hash = sha256_hex(kernel_source);
  SynthRun out;
  const MockTable::Entry* e = table.lookup(hash);
  if (!e) {
    out.bundle.tool_failure = "no mock report for kernel " + hash;
    return out;
  }
  out.elapsed_s = e->elapsed_s;
  out.peak_memory_mb = e->peak_memory_mb;
  if (e->failure) {
    out.bundle.tool_failure = *e->failure;
  } else {
    out.bundle = RawReportBundle::from_directory(*e->bundle_dir);
  }
  return out;
}

SynthesisReport synthesize(const SynthConfig& cfg, const fs::path& kernel_file, const fs::path& tb_file,
                           const fs::path& work_dir) {
  SynthConfig c = cfg;
  if (c.top_function.empty()) c.top_function = kernel_file.stem().string();
  const std::string script = render_tcl(c, fs::absolute(kernel_file), fs::absolute(tb_file));
  SynthRun run = run_synthesis(script, c, read_file(kernel_file), work_dir);
  SynthesisReport rep = parse_report(run.bundle, c);
  rep.elapsed_s = run.elapsed_s;
  rep.peak_memory_mb = run.peak_memory_mb;
  return rep;
}

}  // namespace p2s::synth

#include <fmt/format.h>

#include <cstdlib>

#include "p2s/transpiler/transpiler.hpp"
#include "p2s/util/subprocess.hpp"
#include "p2s/util/text.hpp"

namespace p2s::transpiler {

namespace fs = std::filesystem;

CompileMode parse_compile_mode(std::string_view s) {
  if (s == "REAL" || s == "real") return CompileMode::kReal;
  if (s == "FIXTURE" || s == "fixture") return CompileMode::kFixture;
  throw ConfigError("unknown compile mode '" + std::string(s) + "'");
}

namespace {

struct ScratchDir {
  fs::path path;
  ScratchDir() {
    std::string tmpl = (fs::temp_directory_path() / "p2s-build-XXXXXX").string();
    if (!mkdtemp(tmpl.data())) throw Error("cannot create temporary directory");
    path = tmpl;
  }
  ~ScratchDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

std::string compile_real(const gateway::CandidateSource& src, const std::string& task_id, const CompileConfig& cfg) {
  if (!find_executable(cfg.dafny_binary)) throw ToolNotFound(cfg.dafny_binary);
  ScratchDir dir;
  const std::string stem = task_id.empty() ? "program" : task_id;
  const fs::path file = dir.path / (stem + ".dfy");
  write_file(file, src.text);
  ProcessResult r = run_process({cfg.dafny_binary, "build", "--target:py", file.string()},
                                std::chrono::seconds(cfg.timeout_s), dir.path);
  if (r.timed_out) throw CompileFailed(fmt::format("dafny build timed out after {} s", cfg.timeout_s));
  if (r.exit_code != 0) throw CompileFailed("dafny build failed:\n" + r.output);
  const fs::path out_dir = dir.path / (stem + "-py");
  if (fs::exists(out_dir / "module_.py")) return read_file(out_dir / "module_.py");
  if (fs::is_directory(out_dir)) {
    for (const auto& e : fs::directory_iterator(out_dir)) {
      if (e.path().extension() == ".py" && e.path().filename() != "__main__.py") return read_file(e.path());
    }
  }
  throw CompileFailed("dafny build produced no module under " + out_dir.string());
}

}  // namespace

std::string compile_to_script(const gateway::CandidateSource& src, const std::string& task_id,
                              const CompileConfig& cfg) {
  if (src.is_empty) throw CompileFailed("empty source");
  if (cfg.mode == CompileMode::kReal) return compile_real(src, task_id, cfg);
  const fs::path fixture = cfg.fixture_dir / (task_id + ".py");
  if (!fs::exists(fixture)) throw CompileFailed("no compiled fixture for task '" + task_id + "'");
  return read_file(fixture);
}

}  // namespace p2s::transpiler

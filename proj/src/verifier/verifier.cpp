#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>

#include "p2s/util/subprocess.hpp"
#include "p2s/util/text.hpp"
#include "p2s/verifier/verifier.hpp"

namespace p2s::verifier {

namespace fs = std::filesystem;

namespace {

// Scratch directory removed on scope exit.
class TempDir {
 public:
  TempDir() {
    std::string tmpl = (fs::temp_directory_path() / "p2s-verify-XXXXXX").string();
    if (::mkdtemp(tmpl.data()) == nullptr) throw Error("mkdtemp failed");
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

}  // namespace

DafnyVerifier::DafnyVerifier(DafnyConfig cfg) : cfg_(std::move(cfg)) {}

std::vector<std::string> DafnyVerifier::command_line(const DafnyConfig& cfg, const std::string& file) {
  return {cfg.binary, "verify", file, "--verification-time-limit:" + std::to_string(cfg.timeout_s)};
}

VerifierReport DafnyVerifier::verify(const CandidateSource& source) {
  if (source.is_empty) return empty_input_report();

  auto exe = find_executable(cfg_.binary);
  if (!exe) throw ToolNotFound(cfg_.binary);

  TempDir dir;
  const fs::path file = dir.path() / "candidate.dfy";
  write_file(file, source.text);

  DafnyConfig resolved = cfg_;
  resolved.binary = exe->string();
  ProcessResult run = run_process(command_line(resolved, file.string()),
                                  std::chrono::seconds(cfg_.timeout_s + cfg_.grace_s), dir.path());

  VerifierReport report;
  report.wall_time_ms = run.wall_ms;
  if (run.timed_out) {
    report.status = Status::kTimeout;
    report.error_count = 1;
    report.diagnostics.push_back({Category::kTimeout, std::nullopt, std::nullopt,
                                  "verifier process exceeded " +
                                      std::to_string(cfg_.timeout_s + cfg_.grace_s) + " s"});
    return report;
  }

  ParsedOutput parsed = parse_diagnostics(run.output);
  report.error_count = parsed.error_count;
  report.diagnostics = std::move(parsed.diagnostics);
  if (!parsed.recognized) {
    report.status = Status::kToolError;
  } else if (report.error_count == 0) {
    report.status = Status::kVerified;
  } else {
    bool all_timeouts = !report.diagnostics.empty();
    for (const auto& d : report.diagnostics) all_timeouts = all_timeouts && d.category == Category::kTimeout;
    report.status = all_timeouts ? Status::kTimeout : Status::kFailed;
  }
  return report;
}

}  // namespace p2s::verifier

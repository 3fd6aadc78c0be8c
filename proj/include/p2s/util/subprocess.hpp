#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace p2s {

struct ProcessResult {
  int exit_code = -1;
  bool timed_out = false;
  std::string output;  // stdout and stderr, interleaved
  std::int64_t wall_ms = 0;
  std::optional<double> peak_rss_mb;  // from the child's rusage
};

/// Resolve `name` against PATH (or accept it as-is when it contains a '/').
std::optional<std::filesystem::path> find_executable(std::string_view name);

/// Runs argv[0] with the remaining arguments. The child gets its own process
/// group, which is killed with SIGKILL once `timeout` elapses.
ProcessResult run_process(const std::vector<std::string>& argv,
                          std::chrono::milliseconds timeout,
                          const std::filesystem::path& cwd = {});

}  // namespace p2s

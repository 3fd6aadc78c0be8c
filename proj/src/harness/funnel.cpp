#include <fmt/format.h>

#include <algorithm>
#include <stdexcept>

#include "json.hpp"
#include "p2s/harness/harness.hpp"
#include "p2s/util/text.hpp"

namespace p2s::harness {

using nlohmann::ordered_json;

std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::kNotVerified: return "NOT_VERIFIED";
    case Stage::kVerified: return "VERIFIED";
    case Stage::kCompiledToHls: return "COMPILED_TO_HLS";
    case Stage::kSynthesized: return "SYNTHESIZED";
  }
  return "?";
}

double synth_rate_pct(int verified, int synthesized) {
  if (verified <= 0) return 0.0;
  return 100.0 * synthesized / verified;
}

std::string format_pct(double pct) { return format_fixed(pct, 1); }

void FunnelStats::check_monotone() const {
  if (!(hls_synthesized <= compiled_to_hls && compiled_to_hls <= verified && verified <= total_tasks &&
        hls_synthesized >= 0)) {
    throw std::logic_error(fmt::format("funnel not monotone: {} / {} / {} / {}", total_tasks, verified,
                                       compiled_to_hls, hls_synthesized));
  }
}

FunnelStats aggregate(std::vector<TaskResult> results) {
  std::sort(results.begin(), results.end(), [](const TaskResult& a, const TaskResult& b) { return a.task_id < b.task_id; });
  FunnelStats s;
  s.total_tasks = static_cast<int>(results.size());
  double elapsed = 0.0;
  int attempts = 0;
  double mem = 0.0;
  int mem_n = 0;
  for (const auto& r : results) {
    if (r.stage >= Stage::kVerified) ++s.verified;
    if (r.stage >= Stage::kCompiledToHls) ++s.compiled_to_hls;
    if (r.stage >= Stage::kSynthesized) ++s.hls_synthesized;
    if (r.synthesis) {
      elapsed += r.synthesis->elapsed_s;
      ++attempts;
      if (r.synthesis->peak_memory_mb) {
        mem += *r.synthesis->peak_memory_mb;
        ++mem_n;
      }
    }
  }
  s.synth_rate_pct = synth_rate_pct(s.verified, s.hls_synthesized);
  s.avg_elapsed_s = attempts ? elapsed / attempts : 0.0;
  if (mem_n) s.avg_peak_memory_mb = mem / mem_n;
  s.per_task = std::move(results);
  s.check_monotone();
  return s;
}

namespace {

ordered_json opt(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }
ordered_json opt(const std::optional<long>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }
ordered_json opt(const std::optional<int>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

ordered_json synthesis_json(const synth::SynthesisReport& r) {
  ordered_json j;
  j["status"] = std::string(synth::to_string(r.status));
  j["latency_ns"] = opt(r.latency_ns);
  j["initiation_interval"] = opt(r.initiation_interval);
  j["luts"] = opt(r.luts);
  j["dsps"] = opt(r.dsps);
  j["ffs"] = opt(r.ffs);
  j["elapsed_s"] = r.elapsed_s;
  j["peak_memory_mb"] = opt(r.peak_memory_mb);
  j["failure_detail"] = r.failure_detail ? ordered_json(*r.failure_detail) : ordered_json(nullptr);
  return j;
}

ordered_json task_json(const TaskResult& r) {
  ordered_json t;
  t["task_id"] = r.task_id;
  t["stage_reached"] = std::string(to_string(r.stage));
  t["failure_reason"] = r.failure_reason.empty() ? ordered_json(nullptr) : ordered_json(r.failure_reason);
  t["synthesis"] = r.synthesis ? synthesis_json(*r.synthesis) : ordered_json(nullptr);
  return t;
}

}  // namespace

std::string task_result_to_json(const TaskResult& r) { return task_json(r).dump(2) + "\n"; }

std::string funnel_to_json(const FunnelStats& s) {
  ordered_json j;
  j["total_tasks"] = s.total_tasks;
  j["verified"] = s.verified;
  j["compiled_to_hls"] = s.compiled_to_hls;
  j["hls_synthesized"] = s.hls_synthesized;
  j["synth_rate_pct"] = format_pct(s.synth_rate_pct);
  j["avg_elapsed_s"] = s.avg_elapsed_s;
  j["avg_peak_memory_mb"] = opt(s.avg_peak_memory_mb);
  ordered_json per = ordered_json::array();
  for (const auto& r : s.per_task) per.push_back(task_json(r));
  j["per_task"] = std::move(per);
  return j.dump(2) + "\n";
}

std::vector<PublishedFunnelRow> load_published_funnel(const std::filesystem::path& path) {
  const auto lines = split_lines(read_file(path));
  std::vector<PublishedFunnelRow> rows;
  for (size_t i = 1; i < lines.size(); ++i) {
    if (is_blank(lines[i])) continue;
    std::vector<std::string> f;
    size_t start = 0;
    const std::string& l = lines[i];
    while (true) {
      size_t comma = l.find(',', start);
      f.emplace_back(trim(l.substr(start, comma - start)));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (f.size() != 6) throw ConfigError(fmt::format("{} line {}: expected 6 fields", path.string(), i + 1));
    PublishedFunnelRow r;
    r.model = f[0];
    r.feedback = f[1] == "Yes" || f[1] == "yes" || f[1] == "1" || f[1] == "true";
    try {
      r.verified = std::stoi(f[2]);
      r.compiled = std::stoi(f[3]);
      r.synthesized = std::stoi(f[4]);
    } catch (const std::exception&) {
      throw ConfigError(fmt::format("{} line {}: bad count", path.string(), i + 1));
    }
    r.printed_rate = f[5];
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace p2s::harness

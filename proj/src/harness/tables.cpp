#include <fmt/format.h>

#include <map>
#include <set>

#include "p2s/harness/harness.hpp"
#include "p2s/util/text.hpp"

namespace p2s::harness {

std::string format_delta(double d) {
  const std::string s = format_fixed(d, 1);
  if (s == "0.0" || s == "-0.0") return "0.0";
  return d > 0 ? "+" + s : s;
}

std::vector<RateRow> verification_rate_table(const std::vector<RateGroup>& groups,
                                             const std::optional<std::string>& baseline_model) {
  std::optional<std::set<std::string>> tasks;
  std::string first_key;
  for (const auto& g : groups) {
    std::set<std::string> ids;
    for (const auto& r : g.records) ids.insert(r.task_id);
    const std::string key = fmt::format("{} ({})", g.model, g.feedback ? "with feedback" : "w/o feedback");
    if (!tasks) {
      tasks = std::move(ids);
      first_key = key;
    } else if (ids != *tasks) {
      throw MismatchedTaskSets("task set of " + key + " differs from " + first_key);
    }
  }

  std::vector<RateRow> rows;
  std::map<std::string, size_t> index;
  for (const auto& g : groups) {
    auto [it, inserted] = index.try_emplace(g.model, rows.size());
    if (inserted) rows.push_back(RateRow{g.model, std::nullopt, std::nullopt, std::nullopt, std::nullopt});
    RateRow& row = rows[it->second];
    const size_t n = tasks ? tasks->size() : 0;
    std::set<std::string> verified;
    for (const auto& r : g.records) {
      if (r.outcome == loop::Outcome::kVerified) verified.insert(r.task_id);
    }
    const double pct = n ? 100.0 * static_cast<double>(verified.size()) / static_cast<double>(n) : 0.0;
    (g.feedback ? row.with_pct : row.without_pct) = pct;
  }
  if (baseline_model) {
    auto b = index.find(*baseline_model);
    if (b == index.end()) throw ConfigError("baseline group '" + *baseline_model + "' not present");
    const RateRow base = rows[b->second];
    for (auto& row : rows) {
      if (row.without_pct && base.without_pct) row.delta_without = *row.without_pct - *base.without_pct;
      if (row.with_pct && base.with_pct) row.delta_with = *row.with_pct - *base.with_pct;
    }
  }
  return rows;
}

std::string rate_table_csv(const std::vector<RateRow>& rows) {
  auto cell = [](const std::optional<double>& v, bool delta) {
    if (!v) return std::string();
    return delta ? format_delta(*v) : format_pct(*v);
  };
  std::string out = "model,without_feedback_pct,with_feedback_pct,delta_without,delta_with\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{},{}\n", r.model, cell(r.without_pct, false), cell(r.with_pct, false),
                       cell(r.delta_without, true), cell(r.delta_with, true));
  }
  return out;
}

}  // namespace p2s::harness

#include <fmt/format.h>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <regex>
#include <sstream>

#include "p2s/synth/synth.hpp"
#include "p2s/util/text.hpp"

namespace p2s::synth {

namespace pt = boost::property_tree;

namespace {

struct ParseFail {
  std::string detail;
};

// Element paths below <profile>. DSP has two spellings across tool versions.
constexpr const char* kClockPath = "PerformanceEstimates.SummaryOfTimingAnalysis.EstimatedClockPeriod";
constexpr const char* kBestPath = "PerformanceEstimates.SummaryOfOverallLatency.Best-caseLatency";
constexpr const char* kWorstPath = "PerformanceEstimates.SummaryOfOverallLatency.Worst-caseLatency";
constexpr const char* kIntervalPath = "PerformanceEstimates.SummaryOfOverallLatency.Interval-min";
constexpr const char* kLutPath = "AreaEstimates.Resources.LUT";
constexpr const char* kFfPath = "AreaEstimates.Resources.FF";
constexpr const char* kDspPath = "AreaEstimates.Resources.DSP48E";
constexpr const char* kDspPathNew = "AreaEstimates.Resources.DSP";

std::string leaf(const std::string& path) { return path.substr(path.rfind('.') + 1); }

long to_count(const std::string& raw, const std::string& element) {
  const std::string v(trim(raw));
  if (v == "undef" || v == "?") throw ParseFail{"element " + element + " is undefined (" + v + ")"};
  static const std::regex kInt(R"(^\d+$)");
  if (!std::regex_match(v, kInt)) throw ParseFail{"element " + element + " is not a count: '" + v + "'"};
  try {
    return std::stol(v);
  } catch (const std::exception&) {
    throw ParseFail{"element " + element + " out of range"};
  }
}

double to_decimal(const std::string& raw, const std::string& element) {
  const std::string v(trim(raw));
  static const std::regex kNum(R"(^\d+(\.\d+)?$)");
  if (!std::regex_match(v, kNum)) throw ParseFail{"element " + element + " is not a number: '" + v + "'"};
  return std::stod(v);
}

// Figures pulled from either report flavour.
struct Figures {
  std::optional<double> clock;
  long best = 0;
  long worst = 0;
  std::optional<int> interval;
  long lut = 0;
  long ff = 0;
  long dsp = 0;
};

Figures from_xml(const std::string& text) {
  pt::ptree doc;
  try {
    std::istringstream in(text);
    pt::read_xml(in, doc);
  } catch (const pt::xml_parser_error& e) {
    // Name the first required element the text never closes.
    for (const char* p : {kBestPath, kWorstPath, kFfPath, kLutPath}) {
      const std::string tag = leaf(p);
      if (text.find("</" + tag + ">") == std::string::npos) {
        throw ParseFail{"malformed XML: missing element " + tag};
      }
    }
    throw ParseFail{std::string("malformed XML: ") + e.message()};
  }
  auto root = doc.get_child_optional("profile");
  if (!root) throw ParseFail{"missing element profile"};
  auto need = [&](const char* path) -> std::string {
    auto v = root->get_optional<std::string>(path);
    if (!v) throw ParseFail{"missing element " + leaf(path)};
    return *v;
  };
  Figures f;
  if (auto c = root->get_optional<std::string>(kClockPath)) f.clock = to_decimal(*c, leaf(kClockPath));
  f.best = to_count(need(kBestPath), leaf(kBestPath));
  f.worst = to_count(need(kWorstPath), leaf(kWorstPath));
  if (auto ii = root->get_optional<std::string>(kIntervalPath); ii && trim(*ii) != "undef") {
    f.interval = static_cast<int>(to_count(*ii, leaf(kIntervalPath)));
  }
  f.lut = to_count(need(kLutPath), "LUT");
  f.ff = to_count(need(kFfPath), "FF");
  if (auto d = root->get_optional<std::string>(kDspPath)) {
    f.dsp = to_count(*d, "DSP48E");
  } else {
    f.dsp = to_count(need(kDspPathNew), "DSP");
  }
  return f;
}

std::vector<std::string> cells(const std::string& row) {
  std::vector<std::string> out;
  std::string cur;
  for (size_t i = row.find('|') + 1; i < row.size(); ++i) {
    if (row[i] == '|') {
      out.emplace_back(trim(cur));
      cur.clear();
    } else {
      cur += row[i];
    }
  }
  return out;
}

// Table rows in the plain-text report.
Figures from_rpt(const std::string& text) {
  const auto lines = split_lines(text);
  Figures f;
  bool have_latency = false;
  bool have_total = false;
  std::vector<std::string> util_header;
  for (size_t i = 0; i < lines.size(); ++i) {
    const std::string& l = lines[i];
    if (l.find("|ap_clk") != std::string::npos) {
      auto c = cells(l);
      if (c.size() >= 3) {
        std::string est = c[2];
        if (est.ends_with("ns")) est.resize(est.size() - 2);
        f.clock = to_decimal(est, "estimated clock");
      }
    }
    static const std::regex kMinMax(R"(^\s*\|\s*min\s*\|\s*max\s*\|)");
    if (!have_latency && std::regex_search(l, kMinMax)) {
      // Separator, then the values row.
      for (size_t j = i + 1; j < lines.size() && j <= i + 3; ++j) {
        if (lines[j].find('|') == std::string::npos || lines[j].find("+-") != std::string::npos) continue;
        auto c = cells(lines[j]);
        if (c.size() < 4) break;
        f.best = to_count(c[0], "latency min");
        f.worst = to_count(c[1], "latency max");
        // Newer layouts add absolute-latency columns before the interval.
        const size_t ii_col = c.size() >= 7 ? 4 : 2;
        if (c[ii_col] != "undef") f.interval = static_cast<int>(to_count(c[ii_col], "interval min"));
        have_latency = true;
        break;
      }
    }
    if (l.find("|       Name") != std::string::npos || (l.find("Name") != std::string::npos && l.find("LUT") != std::string::npos)) {
      util_header = cells(l);
    }
    if (!have_total && l.rfind("|Total", 0) == 0 && !util_header.empty()) {
      auto c = cells(l);
      for (size_t k = 0; k < c.size() && k < util_header.size(); ++k) {
        if (util_header[k] == "LUT") f.lut = to_count(c[k], "LUT");
        if (util_header[k] == "FF") f.ff = to_count(c[k], "FF");
        if (util_header[k] == "DSP48E" || util_header[k] == "DSP") f.dsp = to_count(c[k], util_header[k]);
      }
      have_total = true;
    }
  }
  if (!have_latency) throw ParseFail{"text report has no latency summary"};
  if (!have_total) throw ParseFail{"text report has no utilization total"};
  return f;
}

const std::string* find_file(const RawReportBundle& b, const std::string& top, const std::string& ext) {
  auto it = b.files.find(top + "_csynth" + ext);
  if (it != b.files.end()) return &it->second;
  for (const auto& [name, text] : b.files) {
    if (name.size() > 7 + ext.size() && name.ends_with("_csynth" + ext)) return &text;
  }
  return nullptr;
}

}  // namespace

SynthesisReport parse_report(const RawReportBundle& bundle, const SynthConfig& cfg) {
  SynthesisReport r;
  if (bundle.timed_out) {
    r.status = SynthStatus::kTimeout;
    r.failure_detail = "synthesis timed out";
    return r;
  }
  if (bundle.tool_failure) {
    r.status = SynthStatus::kSynthFail;
    r.failure_detail = *bundle.tool_failure;
    return r;
  }
  try {
    Figures f;
    if (const std::string* xml = find_file(bundle, cfg.top_function, ".xml")) {
      f = from_xml(*xml);
    } else if (const std::string* rpt = find_file(bundle, cfg.top_function, ".rpt")) {
      f = from_rpt(*rpt);
    } else {
      throw ParseFail{"bundle has no csynth report"};
    }
    r.status = SynthStatus::kSynthesized;
    r.latency_cycles_best = f.best;
    r.latency_cycles_worst = f.worst;
    r.latency_ns = static_cast<double>(f.worst) * cfg.clock_period_ns;
    r.initiation_interval = f.interval;
    if (r.initiation_interval && *r.initiation_interval < 1) r.initiation_interval.reset();
    r.estimated_clock_ns = f.clock;
    r.luts = f.lut;
    r.ffs = f.ff;
    r.dsps = f.dsp;
  } catch (const ParseFail& e) {
    r = SynthesisReport{};
    r.status = SynthStatus::kParseFail;
    r.failure_detail = e.detail;
  } catch (const std::exception& e) {
    r = SynthesisReport{};
    r.status = SynthStatus::kParseFail;
    r.failure_detail = std::string("report parse error: ") + e.what();
  }
  return r;
}

}  // namespace p2s::synth

#include <sys/stat.h>

#include <cstdlib>

#include "doctest.h"
#include "p2s/synth/synth.hpp"
#include "p2s/util/sha256.hpp"
#include "p2s/util/text.hpp"
#include "support.hpp"

using namespace p2s;
using namespace p2s::synth;

namespace {

RawReportBundle bundle(const std::string& top) {
  return RawReportBundle::from_directory(testing::data_dir() / "reports" / top);
}

SynthConfig cfg_for(const std::string& top) {
  SynthConfig c;
  c.top_function = top;
  return c;
}

std::string replace_once(std::string s, const std::string& from, const std::string& to) {
  auto pos = s.find(from);
  REQUIRE(pos != std::string::npos);
  return s.replace(pos, from.size(), to);
}

struct Row {
  const char* top;
  double latency_ns;
  long lut, dsp, ff;
};

constexpr Row kRows[] = {{"cube", 60, 685, 6, 789},
                         {"triangle_number", 50, 511, 3, 436},
                         {"triangular_prism_volume", 60, 456, 6, 807}};

}  // namespace

TEST_CASE("fixture bundles reproduce the published resource rows") {
  for (const auto& row : kRows) {
    auto r = parse_report(bundle(row.top), cfg_for(row.top));
    REQUIRE(r.status == SynthStatus::kSynthesized);
    CHECK(*r.latency_ns == row.latency_ns);
    CHECK(*r.luts == row.lut);
    CHECK(*r.dsps == row.dsp);
    CHECK(*r.ffs == row.ff);
    CHECK(*r.latency_ns == *r.latency_cycles_worst * 10.0);
  }
}

TEST_CASE("rpt-only bundles parse to the same figures") {
  for (const auto& row : kRows) {
    auto full = bundle(row.top);
    RawReportBundle rpt_only;
    for (auto& [name, text] : full.files) {
      if (name.ends_with(".rpt")) rpt_only.files[name] = text;
    }
    REQUIRE(rpt_only.files.size() == 1);
    auto a = parse_report(full, cfg_for(row.top));
    auto b = parse_report(rpt_only, cfg_for(row.top));
    REQUIRE(b.status == SynthStatus::kSynthesized);
    CHECK(b.latency_ns == a.latency_ns);
    CHECK(b.initiation_interval == a.initiation_interval);
    CHECK(b.luts == a.luts);
    CHECK(b.dsps == a.dsps);
    CHECK(b.ffs == a.ffs);
    CHECK(b.estimated_clock_ns == a.estimated_clock_ns);
  }
}

TEST_CASE("latency scales with the configured clock") {
  auto c = cfg_for("cube");
  c.clock_period_ns = 4.0;
  CHECK(*parse_report(bundle("cube"), c).latency_ns == 24.0);
}

TEST_CASE("malformed or undefined reports give PARSE_FAIL") {
  auto b = bundle("cube");
  const std::string xml_name = "cube_csynth.xml";
  const std::string xml = b.files.at(xml_name);

  RawReportBundle truncated;
  truncated.files[xml_name] = replace_once(xml, "</Worst-caseLatency>", "");
  auto r = parse_report(truncated, cfg_for("cube"));
  CHECK(r.status == SynthStatus::kParseFail);
  REQUIRE(r.failure_detail.has_value());
  CHECK(r.failure_detail->find("Worst-caseLatency") != std::string::npos);

  RawReportBundle undef;
  undef.files[xml_name] = replace_once(xml, "<LUT>685</LUT>", "<LUT>undef</LUT>");
  auto u = parse_report(undef, cfg_for("cube"));
  CHECK(u.status == SynthStatus::kParseFail);
  CHECK(u.failure_detail->find("LUT") != std::string::npos);

  CHECK(parse_report(RawReportBundle{}, cfg_for("cube")).status == SynthStatus::kParseFail);

  RawReportBundle garbage;
  garbage.files[xml_name] = std::string("\0\x01<<<", 5);
  CHECK(parse_report(garbage, cfg_for("cube")).status == SynthStatus::kParseFail);
}

TEST_CASE("tool failure and timeout statuses") {
  RawReportBundle failed;
  failed.tool_failure = "exit code 1";
  auto f = parse_report(failed, cfg_for("cube"));
  CHECK(f.status == SynthStatus::kSynthFail);
  CHECK(*f.failure_detail == "exit code 1");
  RawReportBundle late;
  late.timed_out = true;
  CHECK(parse_report(late, cfg_for("cube")).status == SynthStatus::kTimeout);
}

TEST_CASE("tcl script") {
  SynthConfig c = cfg_for("cube");
  const auto tcl = render_tcl(c, "/k/cube.c", "/k/cube_tb.c");
  CHECK(tcl ==
        "open_project -reset proj\n"
        "set_top cube\n"
        "add_files {/k/cube.c}\n"
        "add_files -tb {/k/cube_tb.c}\n"
        "open_solution -reset solution1\n"
        "set_part {xc7z020clg484-1}\n"
        "create_clock -period 10 -name default\n"
        "csynth_design\n"
        "exit\n");
  CHECK(render_tcl(c, "/k/cube.c", "/k/cube_tb.c") == tcl);
  c.clock_period_ns = 3.5;
  CHECK(render_tcl(c, "/k/cube.c", "/k/cube_tb.c").find("create_clock -period 3.5 -name default") !=
        std::string::npos);
}

TEST_CASE("config validation") {
  SynthConfig c;
  c.clock_period_ns = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = SynthConfig{};
  c.part = "";
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK_THROWS(parse_tool_mode("FAST"));
}

TEST_CASE("mock synthesis looks kernels up by hash") {
  testing::TempDir tmp;
  SynthConfig c;
  c.mock_table = testing::data_dir() / "mock/mock_reports.toml";
  for (const auto& row : kRows) {
    const auto k = testing::data_dir() / "golden" / (std::string(row.top) + ".c");
    auto r = synthesize(c, k, testing::data_dir() / "golden" / (std::string(row.top) + "_tb.c"), tmp / row.top);
    REQUIRE(r.status == SynthStatus::kSynthesized);
    CHECK(*r.luts == row.lut);
    CHECK(r.elapsed_s > 0);
    CHECK(r.peak_memory_mb.has_value());
  }
  auto sum = synthesize(c, testing::data_dir() / "golden/sum_array.c", testing::data_dir() / "golden/sum_array_tb.c",
                        tmp / "sum");
  CHECK(sum.status == SynthStatus::kSynthFail);

  write_file(tmp / "other.c", "int other(void) { return 1; }\n");
  auto unknown = synthesize(c, tmp / "other.c", tmp / "other_tb.c", tmp / "o");
  CHECK(unknown.status == SynthStatus::kSynthFail);

  write_file(tmp / "bad.toml", "[kernels.abc]\nelapsed_s = 1.0\n");
  CHECK_THROWS_AS(MockTable::load(tmp / "bad.toml"), ConfigError);
}

TEST_CASE("real mode drives the configured tool binary") {
  testing::TempDir tmp;
  const auto report_dir = testing::data_dir() / "reports/cube";
  const auto tool = tmp / "fake_hls";
  // write_file replaces the inode, so the mode has to be set after every write.
  auto script = [&](const std::string& body) {
    write_file(tool, body);
    ::chmod(tool.c_str(), 0755);
  };
  script("#!/bin/sh\n[ \"$1\" = -f ] || exit 7\n[ -f \"$2\" ] || exit 8\n"
                   "mkdir -p proj/solution1/syn/report\ncp " +
                       report_dir.string() + "/* proj/solution1/syn/report/\n");
  ::setenv("P2S_HLS_BIN", tool.c_str(), 1);
  SynthConfig c = cfg_for("cube");
  c.tool_mode = ToolMode::kReal;
  auto r = synthesize(c, testing::data_dir() / "golden/cube.c", testing::data_dir() / "golden/cube_tb.c",
                      tmp / "work");
  CHECK(r.status == SynthStatus::kSynthesized);
  CHECK(*r.ffs == 789);
  CHECK(read_file(tmp / "work/run_hls.tcl").find("set_top cube") != std::string::npos);

  script("#!/bin/sh\necho boom\nexit 3\n");
  auto f = synthesize(c, testing::data_dir() / "golden/cube.c", testing::data_dir() / "golden/cube_tb.c",
                      tmp / "work2");
  CHECK(f.status == SynthStatus::kSynthFail);

  script("#!/bin/sh\nsleep 10\n");
  c.tool_timeout_s = 1;
  auto t = synthesize(c, testing::data_dir() / "golden/cube.c", testing::data_dir() / "golden/cube_tb.c",
                      tmp / "work3");
  CHECK(t.status == SynthStatus::kTimeout);

  ::setenv("P2S_HLS_BIN", (tmp / "missing").c_str(), 1);
  CHECK_THROWS_AS(synthesize(c, testing::data_dir() / "golden/cube.c", testing::data_dir() / "golden/cube_tb.c",
                             tmp / "work4"),
                  ToolNotFound);
  ::unsetenv("P2S_HLS_BIN");
}

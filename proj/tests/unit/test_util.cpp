#include <set>

#include "doctest.h"
#include "p2s/util/rng.hpp"
#include "p2s/util/sha256.hpp"
#include "p2s/util/subprocess.hpp"
#include "p2s/util/text.hpp"
#include "support.hpp"

using namespace p2s;
using namespace std::chrono_literals;

TEST_CASE("sha256 known digests") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("format_fixed rounds half away from zero") {
  CHECK(format_fixed(100.0 * 38 / 55, 1) == "69.1");
  CHECK(format_fixed(100.0 * 12 / 23, 1) == "52.2");
  CHECK(format_fixed(0.25, 1) == "0.3");
  CHECK(format_fixed(-0.25, 1) == "-0.3");
  CHECK(format_fixed(2.0, 2) == "2.00");
  CHECK(format_fixed(0.0, 1) == "0.0");
}

TEST_CASE("snake case") {
  CHECK(to_snake_case("TriangleNumber") == "triangle_number");
  CHECK(to_snake_case("Cube") == "cube");
  CHECK(to_snake_case("TriangularPrismVolume") == "triangular_prism_volume");
}

TEST_CASE("split and trim") {
  auto lines = split_lines("a\nb\r\n\nc");
  REQUIRE(lines.size() == 4);
  CHECK(lines[1] == "b");
  CHECK(lines[3] == "c");
  CHECK(trim("  x y \t") == "x y");
  CHECK(is_blank(" \n\t"));
  CHECK(join({"a", "b", "c"}, ",") == "a,b,c");
}

TEST_CASE("file round trip creates parents") {
  testing::TempDir tmp;
  write_file(tmp / "x/y/z.txt", "hello\n");
  CHECK(read_file(tmp / "x/y/z.txt") == "hello\n");
  CHECK_THROWS(read_file(tmp / "missing"));
}

TEST_CASE("rng streams are reproducible and below() stays in range") {
  Rng a(5), b(5);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  Rng r(9);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    auto x = r.below(7);
    CHECK(x < 7);
    seen.insert(x);
    double u = r.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  CHECK(seen.size() == 7);
  CHECK(Rng::seed_from(1, "t001") != Rng::seed_from(1, "t002"));
  CHECK(Rng::seed_from(1, "t001") == Rng::seed_from(1, "t001"));
}

TEST_CASE("subprocess output, exit code and timeout") {
  auto ok = run_process({"/bin/sh", "-c", "echo out; echo err 1>&2; exit 3"}, 5000ms);
  CHECK(ok.exit_code == 3);
  CHECK_FALSE(ok.timed_out);
  CHECK(ok.output.find("out") != std::string::npos);
  CHECK(ok.output.find("err") != std::string::npos);

  auto slow = run_process({"/bin/sh", "-c", "sleep 5"}, 200ms);
  CHECK(slow.timed_out);
  CHECK(slow.wall_ms < 3000);

  CHECK(find_executable("sh").has_value());
  CHECK_FALSE(find_executable("definitely-not-a-real-tool-p2s").has_value());
}

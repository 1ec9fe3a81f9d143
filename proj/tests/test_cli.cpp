// Copyright 2026 The capsule-hil Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Drives the built command-line tool as a subprocess.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <sstream>

#include "hil/bayer_file.hpp"
#include "hil/dataset.hpp"
#include "hil/imaging.hpp"
#include "test_support.hpp"

namespace hil {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

Outcome cli(const std::string& args) {
  // per-test capture files so parallel test processes never collide
  const std::string name = ::testing::UnitTest::GetInstance()->current_test_info()->name();
  const fs::path dir = fs::temp_directory_path() / "capsule-hil-tests";
  fs::create_directories(dir);
  const fs::path out = dir / (name + ".stdout");
  const fs::path err = dir / (name + ".stderr");
  const std::string cmd = std::string("'") + HIL_CLI_PATH + "' " + args + " > '" + out.string() + "' 2> '" +
                          err.string() + "'";
  const int status = std::system(cmd.c_str());
  Outcome o;
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  o.out = test::slurp(out);
  o.err = test::slurp(err);
  return o;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

std::vector<std::string> lines_of(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> v;
  std::string line;
  while (std::getline(in, line)) v.push_back(line);
  return v;
}

TEST(Cli, ConvertWritesMosaicsAndIndex) {
  const fs::path dir = test::scratch_dir();
  test::write_png_study(dir / "study", 3, 640, 480, 500, {"stomach", "colon"});
  const fs::path cache = dir / "cache";
  const Outcome o = cli("convert --manifest " + q(dir / "study" / "manifest.csv") + " --out " + q(cache) +
                        " --pattern rggb --bit-depth 10");
  ASSERT_EQ(o.code, 0) << o.err;

  const Study src = load_manifest(dir / "study" / "manifest.csv");
  const Study idx = load_manifest(cache / "index.csv", {1.0, false});
  ASSERT_EQ(idx.size(), 3U);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(idx[i].timestamp_ms, src[i].timestamp_ms);
    EXPECT_EQ(idx[i].label, src[i].label);
    const BayerImage want =
        rgb_to_bayer(resize_area(decode_rgb_file(src.path_of(src[i])), 320, 320), BayerPattern::RGGB, 10);
    EXPECT_EQ(read_bayer_file(idx.path_of(idx[i])), want);
  }

  // converting again gives the same bytes
  const std::string first = test::slurp(cache / "img_1.bay");
  const std::string index = test::slurp(cache / "index.csv");
  ASSERT_EQ(cli("convert --manifest " + q(dir / "study" / "manifest.csv") + " --out " + q(cache) +
                " --pattern rggb --bit-depth 10")
                .code,
            0);
  EXPECT_EQ(test::slurp(cache / "img_1.bay"), first);
  EXPECT_EQ(test::slurp(cache / "index.csv"), index);
}

TEST(Cli, ConvertReportsBrokenFrames) {
  const fs::path dir = test::scratch_dir();
  test::write_png_study(dir, 2, 640, 640, 100, {"x"});
  test::write_text(dir / "img_1.png", "garbage");
  const Outcome o = cli("convert --manifest " + q(dir / "manifest.csv") + " --out " + q(dir / "cache"));
  EXPECT_EQ(o.code, 1);
  EXPECT_NE(o.err.find("frame 1"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir / "cache" / "index.csv"));
}

TEST(Cli, RunExitCodes) {
  const fs::path dir = test::scratch_dir();
  test::write_png_study(dir, 4, 640, 640, 100, {"x"});
  const Outcome clean = cli("run --preset nominal-75mhz --manifest " + q(dir / "manifest.csv") + " --out " +
                            q(dir / "clean"));
  EXPECT_EQ(clean.code, 0) << clean.err;
  EXPECT_NE(clean.out.find("corrupted: 0"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "clean" / "frames.jsonl"));
  EXPECT_TRUE(fs::exists(dir / "clean" / "summary.json"));

  test::write_text(dir / "faulty.json", R"({
    "preset": "lowpower-5mhz",
    "study": {"manifest": "manifest.csv", "source": "synthetic"},
    "faults": {"distribution": "uniform", "lo_ms": 0, "hi_ms": 2500},
    "capture": {"mode": "fps", "fps": 1.0, "count": 40}
  })");
  const Outcome faulty = cli("run --config " + q(dir / "faulty.json") + " --seed 4 --out " + q(dir / "faulty"));
  EXPECT_EQ(faulty.code, 1) << faulty.err;
  EXPECT_EQ(faulty.out.find("corrupted: 0\n"), std::string::npos);

  EXPECT_EQ(cli("run --preset nominal-75mhz --manifest " + q(dir / "none.csv") + " --out " + q(dir / "x")).code, 2);
  EXPECT_EQ(cli("run --preset warp-speed --out " + q(dir / "x")).code, 2);
  EXPECT_EQ(cli("run --manifest " + q(dir / "manifest.csv")).code, 2);  // no --out
  EXPECT_EQ(cli("frobnicate").code, 2);
}

TEST(Cli, SweepCsv) {
  const Outcome o = cli("sweep --start 0.1 --stop 4.0 --step 0.1");
  ASSERT_EQ(o.code, 0) << o.err;
  const auto rows = lines_of(o.out);
  ASSERT_EQ(rows.size(), 41U);
  EXPECT_EQ(rows[0], "fps,average_mw,active_fraction");
  double prev = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto a = rows[i].find(',');
    const auto b = rows[i].find(',', a + 1);
    const double fps = std::stod(rows[i].substr(0, a));
    const double mw = std::stod(rows[i].substr(a + 1, b - a - 1));
    EXPECT_GE(mw, prev);
    if (fps >= 5e6 / (2.0 * 1'298'880)) {
      EXPECT_DOUBLE_EQ(mw, 8.0);
    }
    if (fps < 1.0) {
      EXPECT_LT(mw, 5.0);
    }
    prev = mw;
  }

  const Outcome empty = cli("sweep --start 2 --stop 1 --step 0.1");
  EXPECT_EQ(empty.code, 0);
  EXPECT_EQ(empty.out, "fps,average_mw,active_fraction\n");

  const fs::path file = test::scratch_dir() / "curve.csv";
  EXPECT_EQ(cli("sweep --p-active 10 --p-idle 2 --out " + q(file)).code, 0);
  EXPECT_EQ(lines_of(test::slurp(file)).size(), 41U);
  EXPECT_EQ(cli("sweep --p-active 1 --p-idle 2").code, 2);
}

TEST(Cli, ReportOverRuns) {
  const fs::path dir = test::scratch_dir();
  test::write_png_study(dir, 3, 32, 32, 100, {"x"});
  for (int lanes : {2, 4}) {
    ASSERT_EQ(cli("run --preset nominal-75mhz --synthetic --lanes " + std::to_string(lanes) + " --manifest " +
                  q(dir / "manifest.csv") + " --out " + q(dir / ("l" + std::to_string(lanes))))
                  .code,
              0);
  }
  const Outcome o = cli("report " + q(dir / "l2") + " " + q(dir / "l4"));
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_NE(o.out.find("corrupted: 0\n"), std::string::npos);
  EXPECT_NE(o.out.find("lanes 2: 3 frames"), std::string::npos);
  EXPECT_NE(o.out.find("lanes 4: 3 frames"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "l2" / "latency_histogram.csv"));

  EXPECT_EQ(cli("report " + q(dir / "missing")).code, 2);
}

}  // namespace
}  // namespace hil

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

#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "hil/campaign.hpp"
#include "hil/report.hpp"
#include "test_support.hpp"

namespace hil {
namespace {

std::filesystem::path make_run(const std::filesystem::path& dir, unsigned lanes, bool faults, std::size_t n = 20) {
  CampaignConfig cfg;
  apply_preset(cfg, faults ? "lowpower-5mhz" : "nominal-75mhz");
  cfg.source = SourceKind::Synthetic;
  cfg.link.lanes = lanes;
  cfg.dut.classifier = ClassifierHook::constant("colon");
  if (faults) {
    cfg.faults.distribution = DelayDistribution::Uniform;
    cfg.faults.hi = SimTime::from_seconds(2.5);
    cfg.capture.count = n;
  }
  const Study study = make_synthetic_study("s", n, 1000, {"stomach", "colon"});
  SyntheticFrameSource src(cfg.twin.profile);
  write_run(run_campaign(cfg, study, src), cfg, dir);
  return dir;
}

// Means straight from the JSONL text, independent of the report code.
std::pair<double, double> jsonl_means(const std::filesystem::path& dir) {
  std::istringstream in(test::slurp(dir / "frames.jsonl"));
  std::string line;
  double first = 0;
  double transfer = 0;
  int timed = 0;
  int n = 0;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    ++n;
    transfer += j["transfer_ps"].get<double>() / 1e9;
    if (!j["first_chunk_ps"].is_null()) {
      ++timed;
      first += (j["first_chunk_ps"].get<double>() - j["request_ps"].get<double>()) / 1e9;
    }
  }
  return {first / timed, transfer / n};
}

TEST(Report, OneLinePerLaneModeWithOracleMeans) {
  const auto dir = test::scratch_dir();
  std::vector<RunData> runs;
  for (unsigned l : {1U, 2U, 4U}) runs.push_back(load_run(make_run(dir / std::to_string(l), l, false)));
  const RunReport r = build_report(runs);
  ASSERT_EQ(r.lanes.size(), 3U);
  EXPECT_EQ(r.frames, 60U);
  // A single lane cannot keep up with a 75 MHz readout: the second call lands
  // after the sensor has already read past its first pixel.
  EXPECT_EQ(runs[0].summary["corrupted"], 20);
  EXPECT_EQ(runs[1].summary["corrupted"], 0);
  EXPECT_EQ(runs[2].summary["corrupted"], 0);
  EXPECT_EQ(r.corrupted, 20U);
  EXPECT_TRUE(r.inconsistencies.empty());
  for (std::size_t i = 0; i < 3; ++i) {
    const auto [first, transfer] = jsonl_means(runs[i].dir);
    EXPECT_EQ(r.lanes[i].lanes, runs[i].frames.front()["lanes"].get<unsigned>());
    EXPECT_NEAR(r.lanes[i].mean_first_chunk_ms, first, 1e-9);
    EXPECT_NEAR(r.lanes[i].mean_transfer_ms, transfer, 1e-9);
  }
  EXPECT_NEAR(r.lanes[0].mean_transfer_ms, 30.48, 1e-9);
  EXPECT_NEAR(r.lanes[2].mean_transfer_ms, 15.12, 1e-9);
  EXPECT_NEAR(r.lanes[2].mean_first_chunk_ms, 8.87, 1e-9);

  const std::string text = render_report(r);
  EXPECT_NE(text.find("corrupted: 20\n"), std::string::npos);
  EXPECT_NE(text.find("lanes 1: 20 frames"), std::string::npos);
  EXPECT_NE(text.find("lanes 2: 20 frames"), std::string::npos);
  EXPECT_NE(text.find("lanes 4: 20 frames, mean first chunk 8.870 ms, mean transfer 15.120 ms"), std::string::npos);
  EXPECT_NE(text.find("summary consistency: ok"), std::string::npos);
  ASSERT_TRUE(r.classifier_accuracy.has_value());
  EXPECT_DOUBLE_EQ(*r.classifier_accuracy, 0.5);
}

TEST(Report, FlaggedListCoversCorruptedFrames) {
  const RunData run = load_run(make_run(test::scratch_dir(), 4, true, 40));
  const RunReport r = build_report(std::span(&run, 1));
  EXPECT_GT(r.corrupted, 0U);
  EXPECT_EQ(r.flagged, run.summary["flagged"].get<std::size_t>());
  EXPECT_EQ(r.corrupted, run.summary["corrupted"].get<std::size_t>());
  for (auto i : r.corrupted_indices) {
    EXPECT_NE(std::find(r.flagged_indices.begin(), r.flagged_indices.end(), i), r.flagged_indices.end()) << i;
  }
}

TEST(Report, DetectsSummaryDisagreement) {
  const auto dir = make_run(test::scratch_dir(), 4, false);
  RunData run = load_run(dir);
  run.summary["corrupted"] = 3;
  const RunReport r = build_report(std::span(&run, 1));
  ASSERT_FALSE(r.inconsistencies.empty());
  EXPECT_EQ(render_report(r).find("summary consistency: ok"), std::string::npos);
}

TEST(Report, MissingOrBrokenRun) {
  const auto dir = test::scratch_dir();
  EXPECT_HIL_ERROR(load_run(dir / "nothing"), ErrorCode::MissingRun);
  test::write_text(dir / "half" / "summary.json", "{}");
  EXPECT_HIL_ERROR(load_run(dir / "half"), ErrorCode::MissingRun);
  test::write_text(dir / "bad" / "summary.json", "{}");
  test::write_text(dir / "bad" / "frames.jsonl", "{not json\n");
  EXPECT_HIL_ERROR(load_run(dir / "bad"), ErrorCode::ParseError);
}

TEST(Histogram, CountsSumToTimedFrames) {
  const auto dir = test::scratch_dir();
  std::vector<RunData> runs = {load_run(make_run(dir / "f", 4, true, 30)), load_run(make_run(dir / "n", 2, false))};
  std::size_t timed = 0;
  for (const auto& run : runs) {
    for (const auto& row : run.frames) timed += row["first_chunk_ps"].is_null() ? 0 : 1;
  }
  std::istringstream in(latency_histogram_csv(runs, 0.5));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "lanes,bin_start_ms,bin_end_ms,count");
  std::size_t total = 0;
  while (std::getline(in, line)) total += std::stoul(line.substr(line.rfind(',') + 1));
  EXPECT_EQ(total, timed);
  EXPECT_HIL_ERROR(latency_histogram_csv(runs, 0.0), ErrorCode::InvalidArgument);
}

TEST(Histogram, FixedLatencyLandsInOneBin) {
  const RunData run = load_run(make_run(test::scratch_dir(), 4, false));
  // 8.87 ms falls into [8.5, 9.0)
  EXPECT_EQ(latency_histogram_csv(std::span(&run, 1), 0.5),
            "lanes,bin_start_ms,bin_end_ms,count\n4,8.500000,9.000000,20\n");
}

}  // namespace
}  // namespace hil

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

#include <map>

#include "hil/dut_verify.hpp"
#include "test_support.hpp"

namespace hil {
namespace {

BayerImage mosaic(std::uint16_t fill) {
  return BayerImage(320, 320, 10, BayerPattern::BGGR, std::vector<std::uint16_t>(320 * 320, fill));
}

TEST(DutReceive, PassThroughOnTheSensorClock) {
  TwinConfig twin;
  SensorTwin t(twin);
  const CaptureSchedule s = t.begin_capture(SimTime::from_ms(3));
  const BayerImage img = mosaic(77);
  const CapturedImage c = dut_receive(DutConfig{}, img, s, twin);
  EXPECT_EQ(c.image, img);
  EXPECT_GE(c.completion, s.usable_readout_end);
  EXPECT_LT(c.completion - s.usable_readout_end, cycles_to_ps(1, twin.clock_hz) + SimTime::from_ps(1));
}

TEST(DutReceive, CompletesOnTheNextDutClockEdge) {
  TwinConfig twin;
  SensorTwin t(twin);
  const CaptureSchedule s = t.begin_capture(SimTime::from_ps(123'456'789));
  for (std::int64_t f : {1'000LL, 3'000'000LL, 48'000'000LL, 100'000'000LL}) {
    DutConfig dut;
    dut.readout_clock_hz = f;
    const SimTime done = dut_receive(dut, mosaic(1), s, twin).completion;
    // smallest k with k / f >= end, computed with a wide integer
    const auto end = static_cast<__int128>(s.usable_readout_end.ps());
    __int128 k = end * f / 1'000'000'000'000;
    if (k * 1'000'000'000'000 < end * f) ++k;
    const __int128 exact_num = k * 1'000'000'000'000;
    const auto rounded = static_cast<std::int64_t>((2 * exact_num + f) / (2 * f));
    EXPECT_EQ(done.ps(), rounded) << f;
    EXPECT_GE(done.ps() + 1, s.usable_readout_end.ps());
  }
}

TEST(DutReceive, Errors) {
  TwinConfig twin;
  SensorTwin t(twin);
  const CaptureSchedule s = t.begin_capture(SimTime{});
  const BayerImage wrong(4, 4, 10, BayerPattern::BGGR, std::vector<std::uint16_t>(16, 0));
  EXPECT_HIL_ERROR(dut_receive(DutConfig{}, wrong, s, twin), ErrorCode::ShapeMismatch);
  const BayerImage rggb(320, 320, 10, BayerPattern::RGGB, std::vector<std::uint16_t>(320 * 320, 0));
  EXPECT_HIL_ERROR(dut_receive(DutConfig{}, rggb, s, twin), ErrorCode::ShapeMismatch);
  DutConfig stopped;
  stopped.readout_clock_hz = 0;
  EXPECT_HIL_ERROR(dut_receive(stopped, mosaic(0), s, twin), ErrorCode::InvalidClock);
}

TEST(Classify, Hooks) {
  const FrameRecord r{4, "f.png", 40, "colon"};
  const BayerImage img = mosaic(0);
  EXPECT_FALSE(classify(ClassifierHook::none(), img, r).has_value());
  EXPECT_EQ(classify(ClassifierHook::oracle(), img, r), "colon");
  EXPECT_EQ(classify(ClassifierHook::constant("stomach"), img, r), "stomach");
  const auto table = ClassifierHook::table({{4, "small_bowel"}});
  EXPECT_EQ(classify(table, img, r), "small_bowel");
  EXPECT_HIL_ERROR(classify(table, img, FrameRecord{5, "g.png", 50, "colon"}), ErrorCode::TableMiss);
}

TEST(Classify, LoadTable) {
  const auto dir = test::scratch_dir();
  test::write_text(dir / "p.csv", "frame_index,predicted_label\r\n0,stomach\n2,\"colon, distal\"\n");
  const auto hook = ClassifierHook::load_table(dir / "p.csv");
  EXPECT_EQ(hook.predictions(), (std::map<std::uint64_t, std::string>{{0, "stomach"}, {2, "colon, distal"}}));
  test::write_text(dir / "bad.csv", "x,stomach\n");
  EXPECT_HIL_ERROR(ClassifierHook::load_table(dir / "bad.csv"), ErrorCode::ParseError);
  EXPECT_HIL_ERROR(ClassifierHook::load_table(dir / "none.csv"), ErrorCode::MissingFile);
}

TEST(VerifyFrame, CountsDeviations) {
  const BayerImage sent = mosaic(5);
  BayerImage got = sent;
  got.samples()[10] = 6;
  got.samples()[20] = 0;
  FrameOutcome o;
  o.underrun_count = 2;
  const FrameVerdict v = verify_frame(sent, got, o, FrameRecord{9, "x", 0, "colon"}, std::string("colon"));
  EXPECT_EQ(v.frame_index, 9U);
  EXPECT_EQ(v.deviations, 2U);
  EXPECT_EQ(v.label_match, true);
  EXPECT_HIL_ERROR(verify_frame(sent, BayerImage(2, 2, 10, BayerPattern::BGGR, {0, 0, 0, 0}), o, FrameRecord{}, {}),
                   ErrorCode::ShapeMismatch);
}

// Constant "stomach" on a study that is 30% stomach scores 0.30.
TEST(Summarize, ConstantClassifierAccuracyMatchesLabelShare) {
  const std::vector<std::string> labels = {"stomach", "small_bowel", "colon", "stomach", "small_bowel",
                                           "colon",   "stomach",     "colon", "colon",   "small_bowel"};
  const BayerImage img = mosaic(3);
  const auto hook = ClassifierHook::constant("stomach");
  std::vector<FrameVerdict> verdicts;
  std::map<std::string, int> histogram;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const FrameRecord r{i, "f", static_cast<std::int64_t>(i), labels[i]};
    verdicts.push_back(verify_frame(img, img, FrameOutcome{}, r, classify(hook, img, r)));
    ++histogram[labels[i]];
  }
  const CampaignReport rep = summarize(verdicts);
  ASSERT_TRUE(rep.classifier_accuracy.has_value());
  EXPECT_DOUBLE_EQ(*rep.classifier_accuracy, static_cast<double>(histogram["stomach"]) / labels.size());
  EXPECT_DOUBLE_EQ(*rep.classifier_accuracy, 0.30);
}

TEST(Summarize, CountsAndLatency) {
  std::vector<FrameVerdict> v(4);
  v[0].flagged = true;
  v[0].deviations = 10;
  v[1].deviations = 0;
  v[2].flagged = true;
  v[3].deviations = 1;
  v[0].first_chunk_latency = SimTime::from_ms(2);
  v[3].first_chunk_latency = SimTime::from_ms(5);
  const CampaignReport r = summarize(v);
  EXPECT_EQ(r.frames, 4U);
  EXPECT_EQ(r.flagged, 2U);
  EXPECT_EQ(r.corrupted, 2U);
  EXPECT_EQ(r.total_deviations, 11U);
  EXPECT_FALSE(r.classifier_accuracy.has_value());
  ASSERT_TRUE(r.latency.has_value());
  EXPECT_EQ(r.latency->min, SimTime::from_ms(2));
  EXPECT_EQ(r.latency->max, SimTime::from_ms(5));
  EXPECT_DOUBLE_EQ(r.latency->mean_ps, 3.5e9);
  EXPECT_HIL_ERROR(summarize({}), ErrorCode::Empty);
}

}  // namespace
}  // namespace hil

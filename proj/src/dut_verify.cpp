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

#include "hil/dut_verify.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>

#include "hil/error.hpp"

namespace hil {

ClassifierHook ClassifierHook::constant(std::string label) {
  ClassifierHook h(Kind::Constant);
  h.label_ = std::move(label);
  return h;
}

ClassifierHook ClassifierHook::table(std::map<std::uint64_t, std::string> predictions) {
  ClassifierHook h(Kind::Table);
  h.table_ = std::move(predictions);
  return h;
}

ClassifierHook ClassifierHook::load_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingFile, path.string());
  std::map<std::uint64_t, std::string> preds;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (lineno == 1 && !f.empty() && f[0] == "frame_index") continue;
    if (f.size() != 2) {
      throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(lineno) + ": expected 2 fields");
    }
    std::uint64_t idx = 0;
    const auto* end = f[0].data() + f[0].size();
    auto [p, ec] = std::from_chars(f[0].data(), end, idx);
    if (ec != std::errc() || p != end || f[0].empty()) {
      throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(lineno) + ": bad frame index");
    }
    preds[idx] = f[1];
  }
  return ClassifierHook::table(std::move(preds));
}

CapturedImage dut_receive(const DutConfig& dut, const BayerImage& served, const CaptureSchedule& schedule,
                          const TwinConfig& twin) {
  const auto& p = twin.profile;
  if (served.width() != p.width || served.height() != p.height || served.bit_depth() != p.bit_depth ||
      served.pattern() != p.pattern) {
    throw Error(ErrorCode::ShapeMismatch, "served image does not match the sensor profile");
  }
  const std::int64_t clock = dut.readout_clock_hz.value_or(twin.clock_hz);
  const std::int64_t edge = ps_to_cycles_ceil(schedule.usable_readout_end, clock);
  return {served, cycles_to_ps(edge, clock)};
}

std::optional<std::string> classify(const ClassifierHook& hook, const BayerImage& /*img*/, const FrameRecord& record) {
  switch (hook.kind()) {
    case ClassifierHook::Kind::None:
      return std::nullopt;
    case ClassifierHook::Kind::Oracle:
      return record.label;
    case ClassifierHook::Kind::Constant:
      return hook.constant_label();
    case ClassifierHook::Kind::Table: {
      const auto it = hook.predictions().find(record.index);
      if (it == hook.predictions().end()) {
        throw Error(ErrorCode::TableMiss, "no prediction for frame " + std::to_string(record.index));
      }
      return it->second;
    }
  }
  return std::nullopt;
}

FrameVerdict verify_frame(const BayerImage& injected, const BayerImage& captured, const FrameOutcome& outcome,
                          const FrameRecord& record, const std::optional<std::string>& predicted) {
  const DiffReport diff = pixel_diff(injected, captured);
  FrameVerdict v;
  v.frame_index = record.index;
  v.flagged = outcome.flagged;
  v.underrun_count = outcome.underrun_count;
  v.deviations = diff.deviations;
  v.label = record.label;
  v.predicted = predicted;
  if (predicted) v.label_match = (*predicted == record.label);
  v.first_chunk_latency = outcome.first_chunk_latency;
  return v;
}

CampaignReport summarize(std::span<const FrameVerdict> verdicts) {
  if (verdicts.empty()) throw Error(ErrorCode::Empty, "no verdicts to summarize");
  CampaignReport r;
  r.frames = verdicts.size();
  std::size_t predicted = 0;
  std::size_t matches = 0;
  std::size_t timed = 0;
  __int128 latency_sum = 0;  // exact, so the mean is order-independent
  for (const auto& v : verdicts) {
    if (v.flagged) ++r.flagged;
    if (v.deviations > 0) ++r.corrupted;
    r.total_deviations += v.deviations;
    if (v.label_match) {
      ++predicted;
      if (*v.label_match) ++matches;
    }
    if (v.first_chunk_latency) {
      const SimTime l = *v.first_chunk_latency;
      if (!r.latency) {
        r.latency = LatencyStats{l, l, 0.0};
      } else {
        r.latency->min = std::min(r.latency->min, l);
        r.latency->max = std::max(r.latency->max, l);
      }
      latency_sum += l.ps();
      ++timed;
    }
  }
  if (predicted > 0) r.classifier_accuracy = static_cast<double>(matches) / static_cast<double>(predicted);
  if (r.latency) r.latency->mean_ps = static_cast<double>(static_cast<long double>(latency_sum) / static_cast<long double>(timed));
  return r;
}

}  // namespace hil

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

/**
 * @file dut_verify.hpp
 * @brief Reference device under test and the back-end verifier.
 *
 * The reference DUT is a pass-through ISP: it returns the mosaic it read from
 * the sensor twin unchanged, on its own clock. Classifier hooks replay label
 * predictions so that model outputs produced elsewhere can be checked against
 * the study labels. Comparison happens in the Bayer domain.
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>

#include "hil/dataset.hpp"
#include "hil/imaging.hpp"
#include "hil/power.hpp"
#include "hil/sensor_twin.hpp"

namespace hil {

class ClassifierHook {
 public:
  enum class Kind { None, Oracle, Constant, Table };

  static ClassifierHook none() { return ClassifierHook(Kind::None); }
  static ClassifierHook oracle() { return ClassifierHook(Kind::Oracle); }
  static ClassifierHook constant(std::string label);
  static ClassifierHook table(std::map<std::uint64_t, std::string> predictions);
  /// Reads a `frame_index,predicted_label` CSV. Throws MissingFile / ParseError.
  static ClassifierHook load_table(const std::filesystem::path& path);

  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  [[nodiscard]] const std::string& constant_label() const noexcept { return label_; }
  [[nodiscard]] const std::map<std::uint64_t, std::string>& predictions() const noexcept { return table_; }

 private:
  explicit ClassifierHook(Kind k) : kind_(k) {}

  Kind kind_;
  std::string label_;
  std::map<std::uint64_t, std::string> table_;
};

struct DutConfig {
  /// Unset: the DUT runs on the sensor clock.
  std::optional<std::int64_t> readout_clock_hz;
  ClassifierHook classifier = ClassifierHook::none();
};

struct CapturedImage {
  BayerImage image;
  /// End of readout rounded up to the next DUT clock edge.
  SimTime completion;
};

/// Throws ShapeMismatch if served does not match the sensor profile, and
/// InvalidClock for a non-positive DUT clock.
CapturedImage dut_receive(const DutConfig& dut, const BayerImage& served, const CaptureSchedule& schedule,
                          const TwinConfig& twin);

/// Oracle -> record.label, Constant -> its label, Table -> table[record.index]
/// (TableMiss if absent), None -> no prediction.
std::optional<std::string> classify(const ClassifierHook& hook, const BayerImage& img, const FrameRecord& record);

struct FrameVerdict {
  std::uint64_t frame_index = 0;
  bool flagged = false;
  std::size_t underrun_count = 0;
  std::size_t deviations = 0;
  std::string label;
  std::optional<std::string> predicted;
  std::optional<bool> label_match;
  std::optional<SimTime> first_chunk_latency;
};

/// Throws ShapeMismatch if the two mosaics disagree in shape.
FrameVerdict verify_frame(const BayerImage& injected, const BayerImage& captured, const FrameOutcome& outcome,
                          const FrameRecord& record, const std::optional<std::string>& predicted);

struct LatencyStats {
  SimTime min;
  SimTime max;
  double mean_ps = 0.0;
};

struct CampaignReport {
  std::size_t frames = 0;
  std::size_t flagged = 0;
  std::size_t corrupted = 0;
  std::uint64_t total_deviations = 0;
  std::optional<double> classifier_accuracy;
  std::optional<LatencyStats> latency;
  std::optional<PowerEstimate> power;
};

/// Aggregates verdicts. Throws Empty for an empty span.
CampaignReport summarize(std::span<const FrameVerdict> verdicts);

}  // namespace hil

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
 * @file campaign.hpp
 * @brief End-to-end verification campaign on the virtual timeline.
 *
 * For every scheduled capture the loop runs
 *
 *   capture request -> twin interrupt -> frame lookup -> back-end latency
 *   (+ injected delay) -> chunked link transfer -> readout -> DUT -> verify
 *
 * A request that arrives while the twin is busy waits until the sensor is
 * idle again; the frame shown is the one current at the actual capture time.
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hil/dataset.hpp"
#include "hil/dut_verify.hpp"
#include "hil/frame_source.hpp"
#include "hil/power.hpp"
#include "hil/sensor_twin.hpp"
#include "hil/transport.hpp"

namespace hil {

struct CapturePlan {
  enum class Mode {
    Study,       ///< one request at every study frame's timestamp
    Fps,         ///< count requests at k / fps seconds
    Timestamps,  ///< explicit request times
  };
  Mode mode = Mode::Study;
  double fps = 1.0;
  std::size_t count = 0;  ///< Fps mode; 0 means "as many as the study has frames"
  std::vector<std::int64_t> timestamps_ms;
};

enum class SourceKind { Files, Synthetic };

struct CampaignConfig {
  std::filesystem::path manifest;
  ManifestOptions manifest_options;
  SourceKind source = SourceKind::Files;
  TwinConfig twin;
  LinkConfig link;
  FaultConfig faults;
  ProviderConfig provider;
  DutConfig dut;
  std::filesystem::path classifier_table;  ///< set when dut.classifier is a table loaded from disk
  std::optional<PowerParams> power;
  CapturePlan capture;
  std::filesystem::path out_dir;
  std::uint64_t seed = 0;
  /// Skip pixel transport/verification and only time the schedule.
  bool timing_only = false;

  void validate() const;
};

/// One JSONL row.
struct FrameLog {
  std::uint64_t capture = 0;
  std::uint64_t frame_index = 0;
  SimTime request;
  std::optional<SimTime> first_chunk;
  SimTime complete;
  SimTime deadline;  ///< absolute: request + deadline
  bool flagged = false;
  std::size_t underrun = 0;
  std::size_t deviations = 0;
  std::string label;
  std::optional<std::string> predicted;
  unsigned lanes = 0;
  SimTime injected_delay;
  SimTime transfer;  ///< link time only: last arrival - link start
  SimTime usable_readout_start;
  SimTime dut_complete;
};

struct CampaignResult {
  std::uint64_t seed = 0;
  std::string study_id;
  std::vector<FrameLog> frames;
  std::vector<FrameVerdict> verdicts;
  CampaignReport report;
  ActivityLog activity;
  std::vector<std::string> violations;

  [[nodiscard]] int exit_code() const noexcept { return (report.corrupted == 0 && violations.empty()) ? 0 : 1; }
};

/// Runs the campaign over an already loaded study. The source supplies the
/// injected mosaics; with timing_only it is never called.
CampaignResult run_campaign(const CampaignConfig& cfg, const Study& study, FrameSource& source);

/// Loads the manifest named in cfg, builds the configured frame source and runs.
CampaignResult run_campaign(const CampaignConfig& cfg);

/// True when every later call lands no later than the readout reaches its
/// first pixel, assuming the first call arrived exactly at readout start.
bool link_keeps_pace(const TransferPlan& plan, const TwinConfig& twin);

nlohmann::ordered_json frame_log_json(const FrameLog& f);
nlohmann::ordered_json summary_json(const CampaignResult& r, const CampaignConfig& cfg);

/// Writes frames.jsonl and summary.json into dir (atomically, one file each).
void write_run(const CampaignResult& r, const CampaignConfig& cfg, const std::filesystem::path& dir);

// Configuration document ---------------------------------------------------

/// Applies a named preset: "nominal-75mhz" or "lowpower-5mhz".
void apply_preset(CampaignConfig& cfg, const std::string& name);

/// Overlays a JSON configuration document on cfg. Relative paths resolve
/// against base_dir. Throws ConfigError on unknown keys or bad values.
void apply_config_json(CampaignConfig& cfg, const nlohmann::json& doc, const std::filesystem::path& base_dir);

nlohmann::ordered_json config_to_json(const CampaignConfig& cfg);

}  // namespace hil

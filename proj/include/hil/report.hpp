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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace hil {

/// A finished run directory: summary.json plus frames.jsonl.
struct RunData {
  std::filesystem::path dir;
  nlohmann::json summary;
  std::vector<nlohmann::json> frames;
};

/// Throws MissingRun if either file is absent, ParseError if one is malformed.
RunData load_run(const std::filesystem::path& dir);

struct LaneStats {
  unsigned lanes = 0;
  std::size_t frames = 0;
  std::size_t timed = 0;  ///< frames with a first chunk
  double mean_first_chunk_ms = 0.0;
  double mean_transfer_ms = 0.0;
};

struct RunReport {
  std::size_t frames = 0;
  std::size_t flagged = 0;
  std::size_t corrupted = 0;
  std::uint64_t total_deviations = 0;
  std::optional<double> classifier_accuracy;
  std::vector<LaneStats> lanes;  ///< ascending lane count
  std::vector<std::uint64_t> flagged_indices;
  std::vector<std::uint64_t> corrupted_indices;
  /// Disagreements between the JSONL rows and each run's summary.json.
  std::vector<std::string> inconsistencies;
};

/// Aggregates the JSONL rows of all runs.
RunReport build_report(std::span<const RunData> runs);

std::string render_report(const RunReport& r);

/// `lanes,bin_start_ms,bin_end_ms,count` over first-chunk latency, one block
/// per lane mode, empty bins included between the first and last occupied one.
std::string latency_histogram_csv(std::span<const RunData> runs, double bin_ms = 0.5);

}  // namespace hil

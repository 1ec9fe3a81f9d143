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
 * @file dataset.hpp
 * @brief Pre-recorded capsule studies and the time -> frame lookup.
 *
 * A study is a chronologically ordered list of labelled frames described by a
 * CSV manifest with the header `index,filename,timestamp_ms,label`. Filenames
 * are relative to the manifest's directory and point at PNG, JPEG or BAY1
 * files. Leaving every timestamp cell empty assigns synthetic timestamps at a
 * uniform source rate.
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hil/sim_kernel.hpp"

namespace hil {

struct FrameRecord {
  std::uint64_t index = 0;
  std::string filename;
  std::int64_t timestamp_ms = 0;
  std::string label;
  friend bool operator==(const FrameRecord&, const FrameRecord&) = default;
};

struct Resolution {
  std::size_t width = 0;
  std::size_t height = 0;
  friend bool operator==(const Resolution&, const Resolution&) = default;
};

/// Immutable after construction. Indices run 0..n-1 and timestamps strictly
/// increase; violations throw ParseError / OrderError / Empty.
class Study {
 public:
  Study(std::string id, std::filesystem::path base_dir, std::vector<FrameRecord> frames, Resolution source);

  [[nodiscard]] const std::string& id() const noexcept { return id_; }
  [[nodiscard]] const std::filesystem::path& base_dir() const noexcept { return base_dir_; }
  [[nodiscard]] const std::vector<FrameRecord>& frames() const noexcept { return frames_; }
  [[nodiscard]] std::size_t size() const noexcept { return frames_.size(); }
  [[nodiscard]] const FrameRecord& operator[](std::size_t i) const { return frames_[i]; }
  [[nodiscard]] Resolution source_resolution() const noexcept { return source_; }
  [[nodiscard]] std::filesystem::path path_of(const FrameRecord& r) const { return base_dir_ / r.filename; }

  friend bool operator==(const Study&, const Study&) = default;

 private:
  std::string id_;
  std::filesystem::path base_dir_;
  std::vector<FrameRecord> frames_;
  Resolution source_;
};

enum class EndPolicy { HoldLast, RaiseEnd };

struct ProviderConfig {
  SimTime load_time = SimTime::from_ns(1'220'000);
  SimTime convert_time = SimTime::from_ns(90'000);
  EndPolicy end_policy = EndPolicy::HoldLast;
  /// Upper bound of an optional uniform jitter added to load_time; 0 disables it.
  SimTime jitter;
};

/// Modeled back-end latency for the ordinal-th fetch: load + convert + jitter.
SimTime provider_latency(const ProviderConfig& cfg, std::uint64_t seed, std::uint64_t ordinal);

struct ManifestOptions {
  /// Rate used to synthesize timestamps when the manifest leaves them blank.
  double synthetic_fps = 1.0;
  /// Decode every referenced image while loading (fails fast on bad files).
  bool decode_images = true;
};

Study load_manifest(const std::filesystem::path& path, const ManifestOptions& opts = {});

/// Writes the manifest for study (filenames as stored, relative to base_dir).
void write_manifest(const Study& study, const std::filesystem::path& path);

/// Latest frame whose timestamp is <= t; times before the first frame map to
/// index 0. Past the last timestamp HoldLast clamps and RaiseEnd throws
/// EndOfStudy.
const FrameRecord& frame_at(const Study& study, SimTime t, EndPolicy policy = EndPolicy::HoldLast);

/// Builds an in-memory study with evenly spaced frames and cyclic labels.
/// Filenames are synthetic ("frame_<i>") and are never opened.
Study make_synthetic_study(std::string id, std::size_t frames, std::int64_t interval_ms,
                           const std::vector<std::string>& labels, Resolution source = {320, 320});

/// Splits one CSV line (RFC 4180 quoting, no embedded newlines).
std::vector<std::string> split_csv_line(const std::string& line);
/// Quotes a field when it contains a comma, quote or whitespace at the edges.
std::string csv_field(const std::string& s);

}  // namespace hil

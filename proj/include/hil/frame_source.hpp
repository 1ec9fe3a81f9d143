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
#include <memory>
#include <optional>

#include "hil/dataset.hpp"
#include "hil/imaging.hpp"
#include "hil/sensor_twin.hpp"

namespace hil {

/// Produces the mosaic injected for a study frame.
class FrameSource {
 public:
  virtual ~FrameSource() = default;
  virtual BayerImage mosaic(const Study& study, const FrameRecord& record) = 0;
};

/// Back-end conversion of real files: PNG/JPEG are decoded, area-resized to
/// the sensor resolution and mosaicked; BAY1 files are used as they are and
/// must already match the profile. Keeps the last frame for repeated requests.
class FileFrameSource final : public FrameSource {
 public:
  explicit FileFrameSource(SensorProfile profile) : profile_(profile) {}
  BayerImage mosaic(const Study& study, const FrameRecord& record) override;

 private:
  SensorProfile profile_;
  std::optional<std::uint64_t> cached_index_;
  BayerImage cached_;
};

/// Deterministic procedural frames for tests and large timing campaigns. Every
/// frame is a distinct 8-bit gradient widened to the sensor depth.
class SyntheticFrameSource final : public FrameSource {
 public:
  explicit SyntheticFrameSource(SensorProfile profile) : profile_(profile) {}
  BayerImage mosaic(const Study& study, const FrameRecord& record) override;

 private:
  SensorProfile profile_;
};

/// The file-backed conversion step for a single record, without caching.
BayerImage convert_frame(const Study& study, const FrameRecord& record, const SensorProfile& profile);

}  // namespace hil

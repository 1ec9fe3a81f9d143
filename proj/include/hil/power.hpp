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

// Duty-cycle power estimate of the emulated sensor.
//
// In idling mode every captured frame costs two frame cycles of activity (the
// discarded frame plus the usable one), so the sensor saturates at half the
// streaming frame rate. Power constants come from the sensor datasheet; the
// defaults below are illustrative only.

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "hil/sensor_twin.hpp"

namespace hil {

struct PowerParams {
  double p_active_mw = 8.0;  // illustrative
  double p_idle_mw = 1.0;    // illustrative

  /// Throws ConfigError unless p_active >= p_idle >= 0.
  void validate() const;
};

struct PowerEstimate {
  double average_mw = 0.0;
  double active_fraction = 0.0;
};

/// Time-weighted mean of the two state powers. Throws EmptyLog for a zero span.
PowerEstimate estimate_power(const ActivityLog& log, const PowerParams& params);

/// min(1, fps * 2 * frame_cycle / clock). Throws NegativeRate / InvalidClock.
double duty_cycle(double fps, std::int64_t clock_hz, const SensorProfile& profile = {});

/// Highest capture rate in idling mode: clock / (2 * frame_cycle).
double idling_max_fps(std::int64_t clock_hz, const SensorProfile& profile = {});

struct PowerPoint {
  double fps = 0.0;
  PowerEstimate estimate;
};

std::vector<PowerPoint> power_sweep(std::span<const double> fps, std::int64_t clock_hz, const PowerParams& params,
                                    const SensorProfile& profile = {});

/// `fps,average_mw,active_fraction` with a header row.
std::string sweep_csv(std::span<const PowerPoint> curve);

/// Inclusive arithmetic range start, start+step, ... <= stop (+1e-9 slack).
/// Empty when stop < start. Throws InvalidArgument for step <= 0.
std::vector<double> fps_range(double start, double stop, double step);

}  // namespace hil

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

#include "hil/power.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <string>

#include "hil/error.hpp"

namespace hil {

void PowerParams::validate() const {
  if (!(p_idle_mw >= 0.0) || !(p_active_mw >= p_idle_mw)) {
    throw Error(ErrorCode::ConfigError, "power parameters must satisfy p_active >= p_idle >= 0");
  }
}

PowerEstimate estimate_power(const ActivityLog& log, const PowerParams& params) {
  params.validate();
  const std::int64_t active = log.active().ps();
  const std::int64_t total = active + log.idle().ps();
  if (total <= 0) throw Error(ErrorCode::EmptyLog, "activity log spans no time");
  PowerEstimate e;
  e.active_fraction = static_cast<double>(active) / static_cast<double>(total);
  e.average_mw = params.p_idle_mw + e.active_fraction * (params.p_active_mw - params.p_idle_mw);
  return e;
}

double duty_cycle(double fps, std::int64_t clock_hz, const SensorProfile& profile) {
  if (!(fps >= 0.0)) throw Error(ErrorCode::NegativeRate, "frame rate must be non-negative");
  if (clock_hz <= 0) throw Error(ErrorCode::InvalidClock, "clock must be positive");
  const double frame_s = static_cast<double>(profile.frame_cycle_cycles) / static_cast<double>(clock_hz);
  return std::min(1.0, fps * 2.0 * frame_s);
}

double idling_max_fps(std::int64_t clock_hz, const SensorProfile& profile) {
  if (clock_hz <= 0) throw Error(ErrorCode::InvalidClock, "clock must be positive");
  return static_cast<double>(clock_hz) / (2.0 * static_cast<double>(profile.frame_cycle_cycles));
}

std::vector<PowerPoint> power_sweep(std::span<const double> fps, std::int64_t clock_hz, const PowerParams& params,
                                    const SensorProfile& profile) {
  params.validate();
  std::vector<PowerPoint> curve;
  curve.reserve(fps.size());
  for (double f : fps) {
    PowerPoint p;
    p.fps = f;
    p.estimate.active_fraction = duty_cycle(f, clock_hz, profile);
    p.estimate.average_mw = params.p_idle_mw + p.estimate.active_fraction * (params.p_active_mw - params.p_idle_mw);
    curve.push_back(p);
  }
  return curve;
}

std::string sweep_csv(std::span<const PowerPoint> curve) {
  std::ostringstream out;
  out << "fps,average_mw,active_fraction\n";
  out << std::setprecision(10);
  for (const auto& p : curve) out << p.fps << ',' << p.estimate.average_mw << ',' << p.estimate.active_fraction << '\n';
  return out.str();
}

std::vector<double> fps_range(double start, double stop, double step) {
  if (!(step > 0.0)) throw Error(ErrorCode::InvalidArgument, "fps step must be positive");
  if (!(start >= 0.0)) throw Error(ErrorCode::NegativeRate, "fps range must be non-negative");
  std::vector<double> out;
  if (stop < start) return out;
  const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  out.reserve(n);
  // Multiply rather than accumulate so 0.1-steps do not drift.
  for (std::size_t k = 0; k < n; ++k) out.push_back(start + static_cast<double>(k) * step);
  return out;
}

}  // namespace hil

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
 * @file sensor_twin.hpp
 * @brief Timing model of a NanEyeC-class miniature image sensor.
 *
 * A capture leaves idle mode at the interrupt time t. The sensor starts a
 * throw-away frame after idle_to_tx_cycles, and the first usable frame starts
 * one full frame cycle after t. Readout is linearised: pixel i is read at
 *
 *     usable_readout_start + cycles_to_ps(i * cycles_per_pixel)
 *
 * The twin owns exactly one image buffer. A pixel whose data has not arrived
 * by its readout time is served from whatever the buffer held before (the
 * previous frame, or zeros for the very first capture); that is an underrun.
 *
 * The sensor is active from t until the end of the usable frame cycle, i.e.
 * for two frame cycles per capture when the first frame is discarded.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hil/imaging.hpp"
#include "hil/sim_kernel.hpp"

namespace hil {

inline constexpr std::int64_t kMaxSensorClockHz = 75'000'000;

struct SensorProfile {
  std::size_t width = 320;
  std::size_t height = 320;
  unsigned bit_depth = 10;
  std::int64_t idle_to_tx_cycles = 11'520;
  std::int64_t frame_cycle_cycles = 1'298'880;
  std::int64_t cycles_per_pixel = 10;
  BayerPattern pattern = BayerPattern::BGGR;
  /// Extra cycles for exposure settings above the minimum; 0 = lowest exposure.
  std::int64_t exposure_offset_cycles = 0;

  [[nodiscard]] std::size_t pixel_count() const noexcept { return width * height; }
  [[nodiscard]] std::int64_t readout_cycles() const noexcept {
    return static_cast<std::int64_t>(pixel_count()) * cycles_per_pixel;
  }
  /// Throws ConfigError when the pixel payload does not fit one frame cycle.
  void validate() const;
};

struct TwinConfig {
  SensorProfile profile;
  std::int64_t clock_hz = kMaxSensorClockHz;
  /// Maximum interrupt -> first chunk latency. Unset means "until usable readout starts".
  std::optional<SimTime> deadline;
  bool discard_first_frame = true;

  /// Cycles from the interrupt to the first usable pixel.
  [[nodiscard]] std::int64_t usable_offset_cycles() const noexcept;
  [[nodiscard]] SimTime effective_deadline() const;
  /// Time from the interrupt to the first usable pixel.
  [[nodiscard]] SimTime physical_window() const;
  /// True when the deadline is no later than the physical window (the
  /// default deadline equals it); then corruption implies a flag.
  [[nodiscard]] bool deadline_within_window() const;
  void validate() const;
};

struct CaptureSchedule {
  SimTime interrupt_at;
  /// Absent when discard_first_frame is off.
  std::optional<SimTime> discard_readout_start;
  SimTime usable_readout_start;
  SimTime usable_readout_end;
  /// End of the usable frame cycle; the sensor returns to idle here.
  SimTime frame_end;
};

struct WriteProgress {
  std::size_t written = 0;
  std::size_t remaining = 0;
};

struct FrameOutcome {
  /// Unset if no chunk arrived before finalisation.
  std::optional<SimTime> first_chunk_latency;
  bool flagged = false;
  std::size_t underrun_count = 0;
  BayerImage served;
};

enum class TwinState { Idle, Active };

struct ActivityTransition {
  SimTime at;
  TwinState state;
  friend bool operator==(const ActivityTransition&, const ActivityTransition&) = default;
};

/// Idle/active ledger. idle + active always equals end() - start().
class ActivityLog {
 public:
  explicit ActivityLog(SimTime start = {}) : start_(start), end_(start) {}

  /// Closes the current state at t and enters next. Throws PastDue for t < end().
  void transition(SimTime t, TwinState next);
  /// Extends the current state up to t without a state change.
  void extend_to(SimTime t);

  [[nodiscard]] SimTime start() const noexcept { return start_; }
  [[nodiscard]] SimTime end() const noexcept { return end_; }
  [[nodiscard]] SimTime idle() const noexcept { return idle_; }
  [[nodiscard]] SimTime active() const noexcept { return active_; }
  [[nodiscard]] TwinState state() const noexcept { return state_; }
  [[nodiscard]] const std::vector<ActivityTransition>& transitions() const noexcept { return transitions_; }

 private:
  void accrue(SimTime t);

  SimTime start_;
  SimTime end_;
  SimTime idle_;
  SimTime active_;
  TwinState state_ = TwinState::Idle;
  std::vector<ActivityTransition> transitions_;
};

class SensorTwin {
 public:
  explicit SensorTwin(TwinConfig cfg, SimTime start = {});

  /// Leaves idle at t and emits the fetch interrupt. Throws Busy while a
  /// capture is in flight or the previous frame cycle has not ended.
  CaptureSchedule begin_capture(SimTime t);

  /// Appends samples at the write pointer. Samples narrower than the sensor
  /// depth (wire_bits < bit_depth) are re-expanded by left shift. Throws
  /// NoCapture, Overflow, or PastDue if arrival precedes the interrupt.
  WriteProgress ingest_chunk(std::span<const std::uint16_t> samples, SimTime arrival, unsigned wire_bits);
  WriteProgress ingest_chunk(std::span<const std::uint16_t> samples, SimTime arrival) {
    return ingest_chunk(samples, arrival, cfg_.profile.bit_depth);
  }

  /// Timing-only ingest: advances the write pointer by count pixels without
  /// moving data. The buffer is left untouched and the finalized frame has an
  /// empty served image. Mixing both ingest forms in one capture throws
  /// InvalidArgument.
  WriteProgress account_chunk(std::size_t count, SimTime arrival);

  /// Throws NoCapture before the first capture and OutOfRange for bad i.
  [[nodiscard]] SimTime readout_pixel_time(std::size_t i) const;

  /// Resolves what the readout saw. A pixel is fresh iff its chunk arrived no
  /// later than its readout time. Requires t >= usable_readout_end.
  FrameOutcome finalize_frame(SimTime t);

  [[nodiscard]] bool capturing() const noexcept { return capturing_; }
  /// Earliest time a new capture may begin.
  [[nodiscard]] SimTime idle_from() const noexcept { return idle_from_; }
  [[nodiscard]] const TwinConfig& config() const noexcept { return cfg_; }
  [[nodiscard]] const std::optional<CaptureSchedule>& schedule() const noexcept { return schedule_; }
  [[nodiscard]] const ActivityLog& activity() const noexcept { return log_; }
  /// Copy of the ledger with the current state extended to t.
  [[nodiscard]] ActivityLog activity_until(SimTime t) const;
  /// Current buffer content (what a readout would see for unwritten pixels).
  [[nodiscard]] const std::vector<std::uint16_t>& buffer() const noexcept { return buffer_; }

 private:
  struct Chunk {
    std::size_t begin;
    std::size_t end;
    SimTime arrival;
  };

  TwinConfig cfg_;
  ActivityLog log_;
  bool capturing_ = false;
  SimTime idle_from_;
  std::optional<CaptureSchedule> schedule_;
  std::vector<std::uint16_t> buffer_;
  std::vector<std::uint16_t> incoming_;
  std::vector<Chunk> chunks_;
  std::size_t write_ptr_ = 0;
  std::optional<SimTime> first_arrival_;
  std::optional<bool> with_data_;  ///< set by the first chunk of a capture

  void check_chunk(std::size_t count, SimTime arrival, bool with_data) const;
  WriteProgress commit_chunk(std::size_t count, SimTime arrival, bool with_data);
};

struct FrameRate {
  double fps = 0.0;
  double payload_bits_per_s = 0.0;
};

/// Continuous streaming (no idle, no discard): fps = clock / frame_cycle.
FrameRate max_frame_rate(std::int64_t clock_hz, const SensorProfile& profile = {});

/// fps * width * height * bit_depth, exact.
std::uint64_t payload_bits_per_second(std::uint64_t fps, const SensorProfile& profile = {});

}  // namespace hil

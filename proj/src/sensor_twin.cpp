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

#include "hil/sensor_twin.hpp"

#include <algorithm>
#include <string>

#include "hil/error.hpp"

namespace hil {

void SensorProfile::validate() const {
  if (width == 0 || height == 0 || width % 2 != 0 || height % 2 != 0) {
    throw Error(ErrorCode::ConfigError, "sensor dimensions must be positive and even");
  }
  if (bit_depth < 8 || bit_depth > 16) throw Error(ErrorCode::ConfigError, "sensor bit depth must be in [8, 16]");
  if (idle_to_tx_cycles < 0 || exposure_offset_cycles < 0 || cycles_per_pixel <= 0 || frame_cycle_cycles <= 0) {
    throw Error(ErrorCode::ConfigError, "sensor cycle counts must be non-negative (cycles_per_pixel > 0)");
  }
  if (idle_to_tx_cycles + exposure_offset_cycles >= frame_cycle_cycles) {
    throw Error(ErrorCode::ConfigError, "idle-to-transmit delay must be shorter than a frame cycle");
  }
  // One bit per cycle on the serial line: the payload and the linearised
  // readout must both fit in a single frame cycle.
  const auto bits = static_cast<std::int64_t>(pixel_count()) * bit_depth;
  if (bits > frame_cycle_cycles || readout_cycles() > frame_cycle_cycles) {
    throw Error(ErrorCode::ConfigError, "pixel payload of " + std::to_string(bits) + " bits does not fit a " +
                                            std::to_string(frame_cycle_cycles) + "-cycle frame");
  }
}

std::int64_t TwinConfig::usable_offset_cycles() const noexcept {
  return discard_first_frame ? profile.frame_cycle_cycles + profile.exposure_offset_cycles
                             : profile.idle_to_tx_cycles + profile.exposure_offset_cycles;
}

SimTime TwinConfig::physical_window() const { return cycles_to_ps(usable_offset_cycles(), clock_hz); }

SimTime TwinConfig::effective_deadline() const { return deadline ? *deadline : physical_window(); }

bool TwinConfig::deadline_within_window() const { return effective_deadline() <= physical_window(); }

void TwinConfig::validate() const {
  profile.validate();
  if (clock_hz <= 0 || clock_hz > kMaxSensorClockHz) {
    throw Error(ErrorCode::InvalidClock, "sensor clock must be in (0, 75 MHz], got " + std::to_string(clock_hz));
  }
  if (deadline && deadline->ps() <= 0) throw Error(ErrorCode::ConfigError, "deadline must be positive");
}

void ActivityLog::accrue(SimTime t) {
  if (t < end_) {
    throw Error(ErrorCode::PastDue, "activity at " + std::to_string(t.ps()) + " ps precedes ledger end " +
                                        std::to_string(end_.ps()) + " ps");
  }
  const SimTime d = t - end_;
  if (state_ == TwinState::Idle) {
    idle_ += d;
  } else {
    active_ += d;
  }
  end_ = t;
}

void ActivityLog::transition(SimTime t, TwinState next) {
  accrue(t);
  state_ = next;
  transitions_.push_back({t, next});
}

void ActivityLog::extend_to(SimTime t) { accrue(t); }

SensorTwin::SensorTwin(TwinConfig cfg, SimTime start)
    : cfg_(std::move(cfg)), log_(start), idle_from_(start) {
  cfg_.validate();
  buffer_.assign(cfg_.profile.pixel_count(), 0);
  incoming_.assign(cfg_.profile.pixel_count(), 0);
}

CaptureSchedule SensorTwin::begin_capture(SimTime t) {
  if (capturing_) throw Error(ErrorCode::Busy, "a capture is already in flight");
  if (t < idle_from_) {
    throw Error(ErrorCode::Busy, "sensor frame cycle runs until " + std::to_string(idle_from_.ps()) + " ps");
  }
  const auto& p = cfg_.profile;
  CaptureSchedule s;
  s.interrupt_at = t;
  if (cfg_.discard_first_frame) {
    s.discard_readout_start = t + cycles_to_ps(p.idle_to_tx_cycles + p.exposure_offset_cycles, cfg_.clock_hz);
  }
  s.usable_readout_start = t + cycles_to_ps(cfg_.usable_offset_cycles(), cfg_.clock_hz);
  s.usable_readout_end = s.usable_readout_start + cycles_to_ps(p.readout_cycles(), cfg_.clock_hz);
  s.frame_end = s.usable_readout_start + cycles_to_ps(p.frame_cycle_cycles, cfg_.clock_hz);

  log_.transition(t, TwinState::Active);
  schedule_ = s;
  capturing_ = true;
  chunks_.clear();
  write_ptr_ = 0;
  first_arrival_.reset();
  with_data_.reset();
  return s;
}

void SensorTwin::check_chunk(std::size_t count, SimTime arrival, bool with_data) const {
  if (!capturing_) throw Error(ErrorCode::NoCapture, "chunk arrived while no capture is in flight");
  if (arrival < schedule_->interrupt_at) throw Error(ErrorCode::PastDue, "chunk arrival precedes the interrupt");
  if (with_data_ && *with_data_ != with_data) {
    throw Error(ErrorCode::InvalidArgument, "a capture cannot mix data and timing-only chunks");
  }
  const std::size_t n = cfg_.profile.pixel_count();
  if (count > n - write_ptr_) {
    throw Error(ErrorCode::Overflow, "chunk of " + std::to_string(count) + " samples exceeds the " +
                                         std::to_string(n - write_ptr_) + " free buffer slots");
  }
}

WriteProgress SensorTwin::commit_chunk(std::size_t count, SimTime arrival, bool with_data) {
  with_data_ = with_data;
  if (count > 0) {
    chunks_.push_back({write_ptr_, write_ptr_ + count, arrival});
    if (!first_arrival_) first_arrival_ = arrival;
  }
  write_ptr_ += count;
  return {write_ptr_, cfg_.profile.pixel_count() - write_ptr_};
}

WriteProgress SensorTwin::ingest_chunk(std::span<const std::uint16_t> samples, SimTime arrival, unsigned wire_bits) {
  check_chunk(samples.size(), arrival, true);
  const unsigned depth = cfg_.profile.bit_depth;
  if (wire_bits == 0 || wire_bits > depth) {
    throw Error(ErrorCode::InvalidArgument, "wire width must be in [1, " + std::to_string(depth) + "] bits");
  }
  const unsigned shift = depth - wire_bits;
  const std::uint32_t limit = 1U << wire_bits;
  std::uint16_t peak = 0;
  for (std::uint16_t v : samples) peak = std::max(peak, v);
  if (peak >= limit) throw Error(ErrorCode::InvalidArgument, "wire sample exceeds wire width");
  std::uint16_t* dst = incoming_.data() + write_ptr_;
  for (std::size_t k = 0; k < samples.size(); ++k) dst[k] = static_cast<std::uint16_t>(samples[k] << shift);
  return commit_chunk(samples.size(), arrival, true);
}

WriteProgress SensorTwin::account_chunk(std::size_t count, SimTime arrival) {
  check_chunk(count, arrival, false);
  return commit_chunk(count, arrival, false);
}

SimTime SensorTwin::readout_pixel_time(std::size_t i) const {
  if (!schedule_) throw Error(ErrorCode::NoCapture, "no capture scheduled");
  if (i >= cfg_.profile.pixel_count()) {
    throw Error(ErrorCode::OutOfRange, "pixel " + std::to_string(i) + " outside the " +
                                           std::to_string(cfg_.profile.pixel_count()) + "-pixel frame");
  }
  return schedule_->usable_readout_start +
         cycles_to_ps(static_cast<std::int64_t>(i) * cfg_.profile.cycles_per_pixel, cfg_.clock_hz);
}

FrameOutcome SensorTwin::finalize_frame(SimTime t) {
  if (!capturing_) throw Error(ErrorCode::NoCapture, "finalize without a capture in flight");
  if (t < schedule_->usable_readout_end) {
    throw Error(ErrorCode::InvalidArgument, "readout still running until " +
                                                std::to_string(schedule_->usable_readout_end.ps()) + " ps");
  }
  const auto& p = cfg_.profile;
  FrameOutcome out;
  if (first_arrival_) out.first_chunk_latency = *first_arrival_ - schedule_->interrupt_at;
  out.flagged = !out.first_chunk_latency || *out.first_chunk_latency > cfg_.effective_deadline();

  // Readout times rise with the pixel index, so the stale part of each chunk
  // is a prefix: pixels read out strictly before the chunk arrived.
  const bool move_data = with_data_.value_or(true);
  std::vector<std::uint16_t> served;
  if (move_data) served = buffer_;
  std::size_t fresh = 0;
  for (const Chunk& c : chunks_) {
    std::size_t lo = c.begin;
    std::size_t hi = c.end;
    while (lo < hi) {
      const std::size_t mid = lo + (hi - lo) / 2;
      if (readout_pixel_time(mid) >= c.arrival) {
        hi = mid;
      } else {
        lo = mid + 1;
      }
    }
    fresh += c.end - lo;
    if (!move_data) continue;
    std::copy(incoming_.begin() + static_cast<std::ptrdiff_t>(lo), incoming_.begin() + static_cast<std::ptrdiff_t>(c.end),
              served.begin() + static_cast<std::ptrdiff_t>(lo));
    // Late data still lands in the buffer and becomes the next frame's stale content.
    std::copy(incoming_.begin() + static_cast<std::ptrdiff_t>(c.begin),
              incoming_.begin() + static_cast<std::ptrdiff_t>(c.end),
              buffer_.begin() + static_cast<std::ptrdiff_t>(c.begin));
  }
  out.underrun_count = p.pixel_count() - fresh;
  if (move_data) out.served = BayerImage(p.width, p.height, p.bit_depth, p.pattern, std::move(served));

  log_.transition(schedule_->frame_end, TwinState::Idle);
  idle_from_ = schedule_->frame_end;
  capturing_ = false;
  return out;
}

ActivityLog SensorTwin::activity_until(SimTime t) const {
  ActivityLog copy = log_;
  if (t > copy.end()) copy.extend_to(t);
  return copy;
}

FrameRate max_frame_rate(std::int64_t clock_hz, const SensorProfile& profile) {
  if (clock_hz <= 0) throw Error(ErrorCode::InvalidClock, "clock must be positive, got " + std::to_string(clock_hz));
  FrameRate r;
  r.fps = static_cast<double>(clock_hz) / static_cast<double>(profile.frame_cycle_cycles);
  r.payload_bits_per_s = r.fps * static_cast<double>(profile.pixel_count()) * profile.bit_depth;
  return r;
}

std::uint64_t payload_bits_per_second(std::uint64_t fps, const SensorProfile& profile) {
  return fps * profile.pixel_count() * profile.bit_depth;
}

}  // namespace hil

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

// PC -> FPGA link model: a USB-to-SPI bridge with 1, 2 or 4 data lanes.
//
// An image is sent in calls_per_image API calls. Every call pays a fixed
// overhead, then streams its share of the pixels at lanes * link_clock bits
// per second. Call k carries pixels [k*n/c, (k+1)*n/c) (integer division,
// c = calls_per_image) and its data is available to the FPGA once the call
// completes. chunk_pixels bounds the size of a single call.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "hil/imaging.hpp"
#include "hil/sim_kernel.hpp"

namespace hil {

struct LinkConfig {
  unsigned lanes = 4;
  std::int64_t link_clock_hz = 40'000'000;
  SimTime per_call_overhead = SimTime::from_ms(5);
  unsigned calls_per_image = 2;
  unsigned bits_per_pixel_on_wire = 8;
  /// Largest number of pixels a single call may carry.
  std::size_t chunk_pixels = 51'200;

  /// Throws ConfigError; the image size is needed for the chunk budget check.
  void validate(std::size_t image_pixels) const;
};

enum class DelayDistribution { None, Uniform };

struct FaultConfig {
  DelayDistribution distribution = DelayDistribution::None;
  SimTime lo;
  SimTime hi;
  std::uint64_t seed = 0;

  void validate() const;
};

struct ChunkArrival {
  std::size_t begin = 0;  ///< first pixel index
  std::size_t end = 0;    ///< one past the last pixel index
  SimTime arrival;
};

struct TransferPlan {
  SimTime request_at;
  /// When the link starts sending (request + back-end latency + injected delay).
  SimTime start;
  std::vector<ChunkArrival> chunk_arrivals;
  /// last arrival - start.
  SimTime total_duration;
};

/// calls * overhead + n * bits_per_pixel / (lanes * link_clock).
SimTime transfer_duration(const LinkConfig& link, std::size_t n_pixels);

/// Arrival schedule for one image. backend_latency is the modeled load and
/// conversion time of the frame provider.
TransferPlan plan_transfer(const LinkConfig& link, SimTime fault_delay, SimTime request_at, std::size_t n_pixels,
                           SimTime backend_latency);

/// Injected back-end delay for a frame. Pure function of (seed, frame_index).
SimTime sample_injected_delay(const FaultConfig& faults, std::uint64_t frame_index);

/// Narrows sensor-depth samples to the wire width (right shift).
std::vector<std::uint16_t> to_wire(std::span<const std::uint16_t> samples, unsigned sample_bits, unsigned wire_bits);

}  // namespace hil

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

#include "hil/transport.hpp"

#include <algorithm>
#include <string>

#include "hil/error.hpp"
#include "hil/rng.hpp"

namespace hil {

void LinkConfig::validate(std::size_t image_pixels) const {
  if (lanes != 1 && lanes != 2 && lanes != 4) {
    throw Error(ErrorCode::ConfigError, "lanes must be 1, 2 or 4, got " + std::to_string(lanes));
  }
  if (link_clock_hz <= 0) throw Error(ErrorCode::InvalidClock, "link clock must be positive");
  if (calls_per_image < 1) throw Error(ErrorCode::ConfigError, "calls_per_image must be at least 1");
  if (bits_per_pixel_on_wire < 1 || bits_per_pixel_on_wire > 16) {
    throw Error(ErrorCode::ConfigError, "bits_per_pixel_on_wire must be in [1, 16]");
  }
  if (chunk_pixels == 0 || chunk_pixels * calls_per_image < image_pixels) {
    throw Error(ErrorCode::ConfigError, std::to_string(calls_per_image) + " calls of at most " +
                                            std::to_string(chunk_pixels) + " pixels cannot carry " +
                                            std::to_string(image_pixels) + " pixels");
  }
}

void FaultConfig::validate() const {
  if (distribution == DelayDistribution::Uniform && lo > hi) {
    throw Error(ErrorCode::ConfigError, "fault delay lower bound exceeds upper bound");
  }
}

SimTime transfer_duration(const LinkConfig& link, std::size_t n_pixels) {
  const SimTime overhead = SimTime::from_ps(link.per_call_overhead.ps() * link.calls_per_image);
  const auto bits = static_cast<std::int64_t>(n_pixels) * link.bits_per_pixel_on_wire;
  return overhead + cycles_to_ps(bits, static_cast<std::int64_t>(link.lanes) * link.link_clock_hz);
}

TransferPlan plan_transfer(const LinkConfig& link, SimTime fault_delay, SimTime request_at, std::size_t n_pixels,
                           SimTime backend_latency) {
  if (n_pixels == 0) throw Error(ErrorCode::InvalidArgument, "cannot plan an empty transfer");
  link.validate(n_pixels);
  const std::int64_t bit_rate = static_cast<std::int64_t>(link.lanes) * link.link_clock_hz;

  TransferPlan plan;
  plan.request_at = request_at;
  plan.start = request_at + backend_latency + fault_delay;

  // Each arrival is computed from absolute totals (calls so far, bits so far)
  // so rounding never accumulates across calls. Empty calls (n < calls) still
  // pay their overhead but deliver nothing.
  const std::uint64_t calls = link.calls_per_image;
  std::size_t sent = 0;
  for (std::uint64_t k = 0; k < calls; ++k) {
    const auto end = static_cast<std::size_t>((k + 1) * n_pixels / calls);
    if (end == sent) continue;
    const SimTime overhead = SimTime::from_ps(link.per_call_overhead.ps() * static_cast<std::int64_t>(k + 1));
    const auto bits = static_cast<std::int64_t>(end) * link.bits_per_pixel_on_wire;
    plan.chunk_arrivals.push_back({sent, end, plan.start + overhead + cycles_to_ps(bits, bit_rate)});
    sent = end;
  }
  plan.total_duration = plan.chunk_arrivals.back().arrival - plan.start;
  return plan;
}

SimTime sample_injected_delay(const FaultConfig& faults, std::uint64_t frame_index) {
  switch (faults.distribution) {
    case DelayDistribution::None:
      return {};
    case DelayDistribution::Uniform:
      return SimTime::from_ps(
          counter_uniform(faults.seed, RngStream::FaultDelay, frame_index, faults.lo.ps(), faults.hi.ps()));
  }
  return {};
}

std::vector<std::uint16_t> to_wire(std::span<const std::uint16_t> samples, unsigned sample_bits, unsigned wire_bits) {
  std::vector<std::uint16_t> out(samples.begin(), samples.end());
  if (wire_bits < sample_bits) {
    const unsigned shift = sample_bits - wire_bits;
    for (auto& s : out) s = static_cast<std::uint16_t>(s >> shift);
  }
  return out;
}

}  // namespace hil

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

// Counter-based random numbers: every draw is a pure function of
// (seed, stream, index), so inserting or skipping one draw never shifts any
// other. The mixer is SplitMix64's finalizer applied twice.

#pragma once

#include <cstdint>

namespace hil {

enum class RngStream : std::uint64_t {
  FaultDelay = 0x6661756c74ULL,
  ProviderJitter = 0x6a6974746572ULL,
};

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30U)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27U)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31U);
}

constexpr std::uint64_t counter_random(std::uint64_t seed, RngStream stream, std::uint64_t index) noexcept {
  return mix64(mix64(seed ^ static_cast<std::uint64_t>(stream)) ^ mix64(index));
}

/// Uniform integer in [lo, hi] (inclusive) by 128-bit multiply-shift.
constexpr std::int64_t counter_uniform(std::uint64_t seed, RngStream stream, std::uint64_t index, std::int64_t lo,
                                       std::int64_t hi) noexcept {
  const auto span = static_cast<unsigned __int128>(hi - lo) + 1;
  const auto r = static_cast<unsigned __int128>(counter_random(seed, stream, index));
  return lo + static_cast<std::int64_t>((r * span) >> 64U);
}

}  // namespace hil

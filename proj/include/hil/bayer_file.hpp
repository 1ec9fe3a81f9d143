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

// Raw mosaic container ("BAY1"):
//
//   offset  size  field
//   0       4     magic "BAY1"
//   4       4     width        (u32 LE)
//   8       4     height       (u32 LE)
//   12      2     bit_depth    (u16 LE)
//   14      2     pattern code (u16 LE, 0=RGGB 1=BGGR 2=GRBG 3=GBRG)
//   16      2*N   samples      (u16 LE, row-major)

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "hil/imaging.hpp"

namespace hil {

inline constexpr std::size_t kBayerHeaderBytes = 16;

std::vector<std::uint8_t> encode_bayer(const BayerImage& img);
/// Throws ParseError on bad magic, truncated payload or out-of-range fields.
BayerImage decode_bayer(std::span<const std::uint8_t> bytes);

/// Atomic write (temp file + rename).
void write_bayer_file(const BayerImage& img, const std::filesystem::path& path);
BayerImage read_bayer_file(const std::filesystem::path& path);

}  // namespace hil

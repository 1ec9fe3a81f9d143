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

#include "hil/bayer_file.hpp"

#include <fstream>
#include <iterator>
#include <string>
#include <string_view>

#include "hil/atomic_file.hpp"
#include "hil/error.hpp"

namespace hil {

namespace {

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFFU));
  out.push_back(static_cast<std::uint8_t>(v >> 8U));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFFU));
}

std::uint16_t get_u16(std::span<const std::uint8_t> b, std::size_t off) {
  return static_cast<std::uint16_t>(b[off] | (b[off + 1] << 8U));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t off) {
  return static_cast<std::uint32_t>(b[off]) | (static_cast<std::uint32_t>(b[off + 1]) << 8U) |
         (static_cast<std::uint32_t>(b[off + 2]) << 16U) | (static_cast<std::uint32_t>(b[off + 3]) << 24U);
}

}  // namespace

std::vector<std::uint8_t> encode_bayer(const BayerImage& img) {
  std::vector<std::uint8_t> out;
  out.reserve(kBayerHeaderBytes + 2 * img.pixel_count());
  for (char c : std::string_view("BAY1")) out.push_back(static_cast<std::uint8_t>(c));
  put_u32(out, static_cast<std::uint32_t>(img.width()));
  put_u32(out, static_cast<std::uint32_t>(img.height()));
  put_u16(out, static_cast<std::uint16_t>(img.bit_depth()));
  put_u16(out, static_cast<std::uint16_t>(img.pattern()));
  for (std::uint16_t s : img.samples()) put_u16(out, s);
  return out;
}

BayerImage decode_bayer(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kBayerHeaderBytes) throw Error(ErrorCode::ParseError, "BAY1 header truncated");
  if (bytes[0] != 'B' || bytes[1] != 'A' || bytes[2] != 'Y' || bytes[3] != '1') {
    throw Error(ErrorCode::ParseError, "bad BAY1 magic");
  }
  const std::uint32_t w = get_u32(bytes, 4);
  const std::uint32_t h = get_u32(bytes, 8);
  const std::uint16_t depth = get_u16(bytes, 12);
  const std::uint16_t code = get_u16(bytes, 14);
  if (code > 3) throw Error(ErrorCode::ParseError, "unknown pattern code " + std::to_string(code));
  const std::uint64_t n = static_cast<std::uint64_t>(w) * h;
  if (bytes.size() != kBayerHeaderBytes + 2 * n) {
    throw Error(ErrorCode::ParseError, "BAY1 payload is " + std::to_string(bytes.size() - kBayerHeaderBytes) +
                                           " bytes, expected " + std::to_string(2 * n));
  }
  std::vector<std::uint16_t> samples(n);
  for (std::uint64_t i = 0; i < n; ++i) samples[i] = get_u16(bytes, kBayerHeaderBytes + 2 * i);
  try {
    return BayerImage(w, h, depth, static_cast<BayerPattern>(code), std::move(samples));
  } catch (const Error& e) {
    throw Error(ErrorCode::ParseError, std::string("invalid BAY1 content: ") + e.what());
  }
}

void write_bayer_file(const BayerImage& img, const std::filesystem::path& path) {
  const auto bytes = encode_bayer(img);
  write_file_atomic(path, std::string(bytes.begin(), bytes.end()));
}

BayerImage read_bayer_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingFile, path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_bayer(bytes);
}

}  // namespace hil

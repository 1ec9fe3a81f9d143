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

// Back-end conversion pipeline: area downscale, RGB -> Bayer mosaic, a
// bilinear demosaic for inspection, and pixel-wise comparison of mosaics.
// All functions are pure. Rounding is half-up on non-negative integers.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

namespace hil {

enum class Channel : std::uint8_t { Red = 0, Green = 1, Blue = 2 };

/// Codes match the on-disk pattern field of the BAY1 format.
enum class BayerPattern : std::uint16_t { RGGB = 0, BGGR = 1, GRBG = 2, GBRG = 3 };

std::string_view to_string(BayerPattern p);
/// Throws InvalidArgument for unknown names.
BayerPattern parse_pattern(std::string_view name);

/// Channel sensed at (row, col) of a mosaic with the given pattern.
constexpr Channel channel_at(BayerPattern p, std::size_t row, std::size_t col) noexcept {
  const unsigned pos = static_cast<unsigned>(((row & 1U) << 1U) | (col & 1U));
  switch (p) {
    case BayerPattern::RGGB: {
      constexpr Channel t[4] = {Channel::Red, Channel::Green, Channel::Green, Channel::Blue};
      return t[pos];
    }
    case BayerPattern::BGGR: {
      constexpr Channel t[4] = {Channel::Blue, Channel::Green, Channel::Green, Channel::Red};
      return t[pos];
    }
    case BayerPattern::GRBG: {
      constexpr Channel t[4] = {Channel::Green, Channel::Red, Channel::Blue, Channel::Green};
      return t[pos];
    }
    case BayerPattern::GBRG: {
      constexpr Channel t[4] = {Channel::Green, Channel::Blue, Channel::Red, Channel::Green};
      return t[pos];
    }
  }
  return Channel::Green;
}

/// 8-bit interleaved RGB raster, row-major.
class RgbImage {
 public:
  RgbImage() = default;
  /// Zero-filled image. Throws InvalidArgument for zero dimensions.
  RgbImage(std::size_t width, std::size_t height);
  /// Throws InvalidArgument if samples.size() != 3 * width * height.
  RgbImage(std::size_t width, std::size_t height, std::vector<std::uint8_t> samples);

  [[nodiscard]] std::size_t width() const noexcept { return width_; }
  [[nodiscard]] std::size_t height() const noexcept { return height_; }
  [[nodiscard]] const std::vector<std::uint8_t>& samples() const noexcept { return samples_; }
  [[nodiscard]] std::vector<std::uint8_t>& samples() noexcept { return samples_; }

  [[nodiscard]] std::uint8_t at(std::size_t row, std::size_t col, Channel c) const {
    return samples_[3 * (row * width_ + col) + static_cast<std::size_t>(c)];
  }
  void set(std::size_t row, std::size_t col, Channel c, std::uint8_t v) {
    samples_[3 * (row * width_ + col) + static_cast<std::size_t>(c)] = v;
  }

  friend bool operator==(const RgbImage&, const RgbImage&) = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<std::uint8_t> samples_;
};

/// Single-channel mosaic. Width and height are even and every sample is
/// below 2^bit_depth.
class BayerImage {
 public:
  BayerImage() = default;
  /// Zero-filled mosaic.
  BayerImage(std::size_t width, std::size_t height, unsigned bit_depth, BayerPattern pattern);
  BayerImage(std::size_t width, std::size_t height, unsigned bit_depth, BayerPattern pattern,
             std::vector<std::uint16_t> samples);

  [[nodiscard]] std::size_t width() const noexcept { return width_; }
  [[nodiscard]] std::size_t height() const noexcept { return height_; }
  [[nodiscard]] std::size_t pixel_count() const noexcept { return width_ * height_; }
  [[nodiscard]] unsigned bit_depth() const noexcept { return bit_depth_; }
  [[nodiscard]] BayerPattern pattern() const noexcept { return pattern_; }
  [[nodiscard]] const std::vector<std::uint16_t>& samples() const noexcept { return samples_; }
  /// Mutable access; callers must keep samples below 2^bit_depth.
  [[nodiscard]] std::vector<std::uint16_t>& samples() noexcept { return samples_; }

  [[nodiscard]] std::uint16_t at(std::size_t row, std::size_t col) const { return samples_[row * width_ + col]; }

  [[nodiscard]] bool same_shape(const BayerImage& o) const noexcept {
    return width_ == o.width_ && height_ == o.height_ && bit_depth_ == o.bit_depth_ && pattern_ == o.pattern_;
  }

  friend bool operator==(const BayerImage&, const BayerImage&) = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  unsigned bit_depth_ = 10;
  BayerPattern pattern_ = BayerPattern::BGGR;
  std::vector<std::uint16_t> samples_;
};

struct DiffReport {
  std::size_t deviations = 0;
  std::uint32_t max_abs_delta = 0;
  std::optional<std::size_t> first_diff_index;
  friend bool operator==(const DiffReport&, const DiffReport&) = default;
};

/// Area-weighted box downscale. Each output channel value is the exact
/// area-weighted mean of the source pixels under its footprint, rounded
/// half-up. Throws Upscale if the target exceeds the source in either axis.
RgbImage resize_area(const RgbImage& img, std::size_t out_w, std::size_t out_h);

/// Picks the pattern's channel at each position and widens 8 -> bit_depth by
/// left shift. bit_depth must be in [8, 16]. Throws OddDimensions.
BayerImage rgb_to_bayer(const RgbImage& img, BayerPattern pattern, unsigned bit_depth = 10);

/// Bilinear reconstruction for inspection. Missing channels are the rounded
/// mean of the same-channel pixels in the 3x3 neighbourhood; coordinates
/// outside the image reflect about the edge (x = -1 -> 1) so the Bayer phase
/// is preserved. Output is narrowed to 8 bits by right shift.
RgbImage demosaic_bilinear(const BayerImage& img);

/// Throws ShapeMismatch unless dimensions, bit depth and pattern agree.
DiffReport pixel_diff(const BayerImage& a, const BayerImage& b);

/// Wire/payload sizes used to check the mosaic data reduction.
std::size_t rgb_payload_bytes(const RgbImage& img);
std::size_t bayer_payload_bytes(const BayerImage& img, unsigned bits_per_sample);

/// Decodes a PNG or JPEG file into RGB order. Throws MissingFile / IoError.
RgbImage decode_rgb_file(const std::filesystem::path& path);
/// Writes PNG (lossless). Used by tooling and tests to build studies.
void encode_png_file(const RgbImage& img, const std::filesystem::path& path);

}  // namespace hil

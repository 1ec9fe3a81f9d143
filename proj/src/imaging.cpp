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

#include "hil/imaging.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "hil/error.hpp"

namespace hil {

std::string_view to_string(BayerPattern p) {
  switch (p) {
    case BayerPattern::RGGB: return "RGGB";
    case BayerPattern::BGGR: return "BGGR";
    case BayerPattern::GRBG: return "GRBG";
    case BayerPattern::GBRG: return "GBRG";
  }
  return "?";
}

BayerPattern parse_pattern(std::string_view name) {
  std::string up(name);
  std::transform(up.begin(), up.end(), up.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (up == "RGGB") return BayerPattern::RGGB;
  if (up == "BGGR") return BayerPattern::BGGR;
  if (up == "GRBG") return BayerPattern::GRBG;
  if (up == "GBRG") return BayerPattern::GBRG;
  throw Error(ErrorCode::InvalidArgument, "unknown Bayer pattern '" + std::string(name) + "'");
}

RgbImage::RgbImage(std::size_t width, std::size_t height)
    : RgbImage(width, height, std::vector<std::uint8_t>(3 * width * height, 0)) {}

RgbImage::RgbImage(std::size_t width, std::size_t height, std::vector<std::uint8_t> samples)
    : width_(width), height_(height), samples_(std::move(samples)) {
  if (width == 0 || height == 0) throw Error(ErrorCode::InvalidArgument, "RGB image must be non-empty");
  if (samples_.size() != 3 * width * height) {
    throw Error(ErrorCode::InvalidArgument, "RGB sample count " + std::to_string(samples_.size()) +
                                                " does not match " + std::to_string(width) + "x" +
                                                std::to_string(height));
  }
}

BayerImage::BayerImage(std::size_t width, std::size_t height, unsigned bit_depth, BayerPattern pattern)
    : BayerImage(width, height, bit_depth, pattern, std::vector<std::uint16_t>(width * height, 0)) {}

BayerImage::BayerImage(std::size_t width, std::size_t height, unsigned bit_depth, BayerPattern pattern,
                       std::vector<std::uint16_t> samples)
    : width_(width), height_(height), bit_depth_(bit_depth), pattern_(pattern), samples_(std::move(samples)) {
  if (width == 0 || height == 0) throw Error(ErrorCode::InvalidArgument, "Bayer image must be non-empty");
  if (width % 2 != 0 || height % 2 != 0) {
    throw Error(ErrorCode::OddDimensions,
                "Bayer image must have even dimensions, got " + std::to_string(width) + "x" + std::to_string(height));
  }
  if (bit_depth < 1 || bit_depth > 16) {
    throw Error(ErrorCode::InvalidArgument, "bit depth must be in [1, 16], got " + std::to_string(bit_depth));
  }
  if (samples_.size() != width * height) {
    throw Error(ErrorCode::InvalidArgument, "Bayer sample count does not match dimensions");
  }
  const std::uint32_t limit = 1U << bit_depth;
  std::uint16_t peak = 0;
  for (std::uint16_t v : samples_) peak = std::max(peak, v);  // branch-free so it vectorises
  if (peak < limit) return;
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (samples_[i] >= limit) {
      throw Error(ErrorCode::InvalidArgument, "sample " + std::to_string(i) + " exceeds " +
                                                  std::to_string(bit_depth) + "-bit range");
    }
  }
}

namespace {

struct Tap {
  std::size_t src;
  std::uint64_t weight;
};

// For output cell o over [o*src_len, (o+1)*src_len) in units where each source
// pixel spans dst_len, the weight of source pixel s is the length of overlap.
std::vector<std::vector<Tap>> area_taps(std::size_t src_len, std::size_t dst_len) {
  std::vector<std::vector<Tap>> taps(dst_len);
  for (std::size_t o = 0; o < dst_len; ++o) {
    const std::uint64_t lo = static_cast<std::uint64_t>(o) * src_len;
    const std::uint64_t hi = lo + src_len;
    for (std::size_t s = lo / dst_len; s < src_len && static_cast<std::uint64_t>(s) * dst_len < hi; ++s) {
      const std::uint64_t s_lo = static_cast<std::uint64_t>(s) * dst_len;
      const std::uint64_t s_hi = s_lo + dst_len;
      const std::uint64_t w = std::min(hi, s_hi) - std::max(lo, s_lo);
      if (w > 0) taps[o].push_back({s, w});
    }
  }
  return taps;
}

std::size_t reflect(std::ptrdiff_t i, std::size_t n) {
  if (n == 1) return 0;
  if (i < 0) return static_cast<std::size_t>(-i);
  if (static_cast<std::size_t>(i) >= n) return 2 * n - 2 - static_cast<std::size_t>(i);
  return static_cast<std::size_t>(i);
}

}  // namespace

RgbImage resize_area(const RgbImage& img, std::size_t out_w, std::size_t out_h) {
  if (out_w == 0 || out_h == 0) throw Error(ErrorCode::InvalidArgument, "target dimensions must be positive");
  if (img.width() < out_w || img.height() < out_h) {
    throw Error(ErrorCode::Upscale, "source " + std::to_string(img.width()) + "x" + std::to_string(img.height()) +
                                        " is smaller than target " + std::to_string(out_w) + "x" +
                                        std::to_string(out_h));
  }
  if (img.width() == out_w && img.height() == out_h) return img;

  const auto xt = area_taps(img.width(), out_w);
  const auto yt = area_taps(img.height(), out_h);
  const std::uint64_t denom = static_cast<std::uint64_t>(img.width()) * img.height();

  RgbImage out(out_w, out_h);
  const auto& src = img.samples();
  auto& dst = out.samples();
  for (std::size_t oy = 0; oy < out_h; ++oy) {
    for (std::size_t ox = 0; ox < out_w; ++ox) {
      std::uint64_t acc[3] = {0, 0, 0};
      for (const Tap& ty : yt[oy]) {
        for (const Tap& tx : xt[ox]) {
          const std::uint64_t w = ty.weight * tx.weight;
          const std::size_t base = 3 * (ty.src * img.width() + tx.src);
          acc[0] += w * src[base];
          acc[1] += w * src[base + 1];
          acc[2] += w * src[base + 2];
        }
      }
      const std::size_t o = 3 * (oy * out_w + ox);
      for (int c = 0; c < 3; ++c) dst[o + c] = static_cast<std::uint8_t>((2 * acc[c] + denom) / (2 * denom));
    }
  }
  return out;
}

BayerImage rgb_to_bayer(const RgbImage& img, BayerPattern pattern, unsigned bit_depth) {
  if (bit_depth < 8 || bit_depth > 16) {
    throw Error(ErrorCode::InvalidArgument, "mosaic bit depth must be in [8, 16], got " + std::to_string(bit_depth));
  }
  if (img.width() % 2 != 0 || img.height() % 2 != 0) {
    throw Error(ErrorCode::OddDimensions, "cannot mosaic " + std::to_string(img.width()) + "x" +
                                              std::to_string(img.height()) + " image");
  }
  const unsigned shift = bit_depth - 8;
  std::vector<std::uint16_t> out(img.width() * img.height());
  for (std::size_t r = 0; r < img.height(); ++r) {
    for (std::size_t c = 0; c < img.width(); ++c) {
      out[r * img.width() + c] = static_cast<std::uint16_t>(img.at(r, c, channel_at(pattern, r, c)) << shift);
    }
  }
  return BayerImage(img.width(), img.height(), bit_depth, pattern, std::move(out));
}

RgbImage demosaic_bilinear(const BayerImage& img) {
  const std::size_t w = img.width();
  const std::size_t h = img.height();
  const unsigned shift = img.bit_depth() > 8 ? img.bit_depth() - 8 : 0;
  RgbImage out(w, h);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      const Channel own = channel_at(img.pattern(), r, c);
      std::uint32_t sum[3] = {0, 0, 0};
      std::uint32_t cnt[3] = {0, 0, 0};
      for (std::ptrdiff_t dr = -1; dr <= 1; ++dr) {
        for (std::ptrdiff_t dc = -1; dc <= 1; ++dc) {
          if (dr == 0 && dc == 0) continue;
          const std::size_t rr = reflect(static_cast<std::ptrdiff_t>(r) + dr, h);
          const std::size_t cc = reflect(static_cast<std::ptrdiff_t>(c) + dc, w);
          const auto ch = static_cast<std::size_t>(channel_at(img.pattern(), rr, cc));
          sum[ch] += img.at(rr, cc);
          ++cnt[ch];
        }
      }
      for (std::size_t ch = 0; ch < 3; ++ch) {
        std::uint32_t v;
        if (static_cast<Channel>(ch) == own) {
          v = img.at(r, c);
        } else {
          v = (2 * sum[ch] + cnt[ch]) / (2 * cnt[ch]);
        }
        out.set(r, c, static_cast<Channel>(ch), static_cast<std::uint8_t>(std::min<std::uint32_t>(v >> shift, 255)));
      }
    }
  }
  return out;
}

DiffReport pixel_diff(const BayerImage& a, const BayerImage& b) {
  if (!a.same_shape(b)) {
    throw Error(ErrorCode::ShapeMismatch,
                std::to_string(a.width()) + "x" + std::to_string(a.height()) + "/" + std::to_string(a.bit_depth()) +
                    "bit/" + std::string(to_string(a.pattern())) + " vs " + std::to_string(b.width()) + "x" +
                    std::to_string(b.height()) + "/" + std::to_string(b.bit_depth()) + "bit/" +
                    std::string(to_string(b.pattern())));
  }
  DiffReport rep;
  const auto& sa = a.samples();
  const auto& sb = b.samples();
  for (std::size_t i = 0; i < sa.size(); ++i) {
    if (sa[i] == sb[i]) continue;
    const std::uint32_t d = sa[i] > sb[i] ? sa[i] - sb[i] : sb[i] - sa[i];
    if (rep.deviations == 0) rep.first_diff_index = i;
    ++rep.deviations;
    rep.max_abs_delta = std::max(rep.max_abs_delta, d);
  }
  return rep;
}

std::size_t rgb_payload_bytes(const RgbImage& img) { return img.samples().size(); }

std::size_t bayer_payload_bytes(const BayerImage& img, unsigned bits_per_sample) {
  return (img.pixel_count() * bits_per_sample + 7) / 8;
}

RgbImage decode_rgb_file(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw Error(ErrorCode::MissingFile, path.string());
  }
  cv::Mat bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
  if (bgr.empty()) throw Error(ErrorCode::IoError, "cannot decode image " + path.string());
  if (bgr.depth() != CV_8U || bgr.channels() != 3) {
    throw Error(ErrorCode::IoError, "unsupported pixel format in " + path.string());
  }
  const auto w = static_cast<std::size_t>(bgr.cols);
  const auto h = static_cast<std::size_t>(bgr.rows);
  std::vector<std::uint8_t> rgb(3 * w * h);
  for (std::size_t r = 0; r < h; ++r) {
    const auto* row = bgr.ptr<std::uint8_t>(static_cast<int>(r));
    for (std::size_t c = 0; c < w; ++c) {
      const std::size_t o = 3 * (r * w + c);
      rgb[o] = row[3 * c + 2];
      rgb[o + 1] = row[3 * c + 1];
      rgb[o + 2] = row[3 * c];
    }
  }
  return RgbImage(w, h, std::move(rgb));
}

void encode_png_file(const RgbImage& img, const std::filesystem::path& path) {
  cv::Mat bgr(static_cast<int>(img.height()), static_cast<int>(img.width()), CV_8UC3);
  for (std::size_t r = 0; r < img.height(); ++r) {
    auto* row = bgr.ptr<std::uint8_t>(static_cast<int>(r));
    for (std::size_t c = 0; c < img.width(); ++c) {
      row[3 * c] = img.at(r, c, Channel::Blue);
      row[3 * c + 1] = img.at(r, c, Channel::Green);
      row[3 * c + 2] = img.at(r, c, Channel::Red);
    }
  }
  if (!cv::imwrite(path.string(), bgr)) throw Error(ErrorCode::IoError, "cannot write " + path.string());
}

}  // namespace hil

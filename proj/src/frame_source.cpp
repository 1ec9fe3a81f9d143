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

#include "hil/frame_source.hpp"

#include <algorithm>
#include <cctype>

#include "hil/bayer_file.hpp"
#include "hil/error.hpp"

namespace hil {

namespace {

bool is_bayer_file(const std::filesystem::path& p) {
  auto ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".bay";
}

}  // namespace

BayerImage convert_frame(const Study& study, const FrameRecord& record, const SensorProfile& profile) {
  const auto path = study.path_of(record);
  if (is_bayer_file(path)) {
    BayerImage img = read_bayer_file(path);
    if (img.width() != profile.width || img.height() != profile.height || img.bit_depth() != profile.bit_depth ||
        img.pattern() != profile.pattern) {
      throw Error(ErrorCode::ShapeMismatch, path.string() + " does not match the sensor profile");
    }
    return img;
  }
  const RgbImage rgb = decode_rgb_file(path);
  return rgb_to_bayer(resize_area(rgb, profile.width, profile.height), profile.pattern, profile.bit_depth);
}

BayerImage FileFrameSource::mosaic(const Study& study, const FrameRecord& record) {
  if (cached_index_ && *cached_index_ == record.index) return cached_;
  cached_ = convert_frame(study, record, profile_);
  cached_index_ = record.index;
  return cached_;
}

BayerImage SyntheticFrameSource::mosaic(const Study& /*study*/, const FrameRecord& record) {
  const unsigned shift = profile_.bit_depth - 8;
  const std::size_t w = profile_.width;
  const std::size_t h = profile_.height;
  std::vector<std::uint16_t> s(w * h);
  const std::size_t phase = static_cast<std::size_t>(record.index) * 37U;
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      s[r * w + c] = static_cast<std::uint16_t>(((c + 3 * r + phase) & 0xFFU) << shift);
    }
  }
  return BayerImage(w, h, profile_.bit_depth, profile_.pattern, std::move(s));
}

}  // namespace hil

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

#include "hil/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hil/atomic_file.hpp"
#include "hil/bayer_file.hpp"
#include "hil/error.hpp"
#include "hil/imaging.hpp"
#include "hil/rng.hpp"

namespace hil {

namespace {

constexpr std::int64_t kPsPerMs = 1'000'000'000;

template <typename Int>
bool parse_int(const std::string& s, Int& out) {
  if (s.empty()) return false;
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && p == end;
}

std::string trim_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

Resolution probe_resolution(const std::filesystem::path& file) {
  auto ext = file.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == ".bay") {
    const BayerImage img = read_bayer_file(file);
    return {img.width(), img.height()};
  }
  const RgbImage img = decode_rgb_file(file);
  return {img.width(), img.height()};
}

}  // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (quoted) throw Error(ErrorCode::ParseError, "unterminated quote in: " + line);
  fields.push_back(std::move(cur));
  return fields;
}

std::string csv_field(const std::string& s) {
  const bool needs = s.find_first_of(",\"\n\r") != std::string::npos ||
                     (!s.empty() && (std::isspace(static_cast<unsigned char>(s.front())) ||
                                     std::isspace(static_cast<unsigned char>(s.back()))));
  if (!needs) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

Study::Study(std::string id, std::filesystem::path base_dir, std::vector<FrameRecord> frames, Resolution source)
    : id_(std::move(id)), base_dir_(std::move(base_dir)), frames_(std::move(frames)), source_(source) {
  if (frames_.empty()) throw Error(ErrorCode::Empty, "study '" + id_ + "' has no frames");
  for (std::size_t i = 0; i < frames_.size(); ++i) {
    if (frames_[i].index != i) {
      throw Error(ErrorCode::ParseError, "frame indices must be contiguous from 0; row " + std::to_string(i) +
                                             " has index " + std::to_string(frames_[i].index));
    }
    if (frames_[i].timestamp_ms < 0) {
      throw Error(ErrorCode::OrderError, "negative timestamp at index " + std::to_string(i));
    }
    if (i > 0 && frames_[i].timestamp_ms <= frames_[i - 1].timestamp_ms) {
      throw Error(ErrorCode::OrderError, "timestamp " + std::to_string(frames_[i].timestamp_ms) + " at index " +
                                             std::to_string(i) + " does not exceed " +
                                             std::to_string(frames_[i - 1].timestamp_ms));
    }
  }
}

SimTime provider_latency(const ProviderConfig& cfg, std::uint64_t seed, std::uint64_t ordinal) {
  SimTime t = cfg.load_time + cfg.convert_time;
  if (cfg.jitter.ps() > 0) {
    t += SimTime::from_ps(counter_uniform(seed, RngStream::ProviderJitter, ordinal, 0, cfg.jitter.ps()));
  }
  return t;
}

Study load_manifest(const std::filesystem::path& path, const ManifestOptions& opts) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingFile, path.string());

  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::ParseError, "empty manifest " + path.string());
  line = trim_cr(line);
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  const auto header = split_csv_line(line);
  if (header != std::vector<std::string>{"index", "filename", "timestamp_ms", "label"}) {
    throw Error(ErrorCode::ParseError, "manifest header must be index,filename,timestamp_ms,label");
  }

  std::vector<FrameRecord> frames;
  std::size_t blank_ts = 0;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim_cr(line);
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 4) {
      throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(lineno) + ": expected 4 fields, got " +
                                             std::to_string(f.size()));
    }
    FrameRecord r;
    if (!parse_int(f[0], r.index)) {
      throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(lineno) + ": bad index '" + f[0] + "'");
    }
    if (f[1].empty()) throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(lineno) + ": empty filename");
    r.filename = f[1];
    if (f[2].empty()) {
      ++blank_ts;
    } else if (!parse_int(f[2], r.timestamp_ms)) {
      throw Error(ErrorCode::ParseError,
                  path.string() + ":" + std::to_string(lineno) + ": bad timestamp '" + f[2] + "'");
    }
    r.label = f[3];
    frames.push_back(std::move(r));
  }
  if (frames.empty()) throw Error(ErrorCode::ParseError, "manifest " + path.string() + " has no rows");
  if (blank_ts != 0 && blank_ts != frames.size()) {
    throw Error(ErrorCode::ParseError, "timestamps must be given for every row or for none");
  }
  if (blank_ts != 0) {
    if (!(opts.synthetic_fps > 0.0)) throw Error(ErrorCode::ConfigError, "synthetic_fps must be positive");
    for (auto& r : frames) {
      r.timestamp_ms = static_cast<std::int64_t>(std::floor(static_cast<double>(r.index) * 1000.0 / opts.synthetic_fps + 0.5));
    }
  }

  const std::filesystem::path base = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  Resolution res{};
  for (const auto& r : frames) {
    const auto file = base / r.filename;
    std::error_code ec;
    if (!std::filesystem::is_regular_file(file, ec)) throw Error(ErrorCode::MissingFile, file.string());
    if (opts.decode_images) {
      const Resolution here = probe_resolution(file);
      if (res.width == 0) res = here;
    }
  }
  std::string id = base.filename().string();
  if (id.empty() || id == ".") id = path.stem().string();
  return Study(std::move(id), base, std::move(frames), res);
}

void write_manifest(const Study& study, const std::filesystem::path& path) {
  std::ostringstream out;
  out << "index,filename,timestamp_ms,label\n";
  for (const auto& r : study.frames()) {
    out << r.index << ',' << csv_field(r.filename) << ',' << r.timestamp_ms << ',' << csv_field(r.label) << '\n';
  }
  write_file_atomic(path, out.str());
}

const FrameRecord& frame_at(const Study& study, SimTime t, EndPolicy policy) {
  const auto& frames = study.frames();
  if (policy == EndPolicy::RaiseEnd && t.ps() > frames.back().timestamp_ms * kPsPerMs) {
    throw Error(ErrorCode::EndOfStudy, "t = " + std::to_string(t.ps()) + " ps is past the last frame of '" +
                                           study.id() + "'");
  }
  // First frame whose timestamp is strictly after t; its predecessor is the answer.
  auto it = std::upper_bound(frames.begin(), frames.end(), t.ps(),
                             [](std::int64_t ps, const FrameRecord& r) { return ps < r.timestamp_ms * kPsPerMs; });
  if (it == frames.begin()) return frames.front();
  return *std::prev(it);
}

Study make_synthetic_study(std::string id, std::size_t frames, std::int64_t interval_ms,
                           const std::vector<std::string>& labels, Resolution source) {
  if (interval_ms <= 0) throw Error(ErrorCode::InvalidArgument, "frame interval must be positive");
  std::vector<FrameRecord> recs;
  recs.reserve(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    FrameRecord r;
    r.index = i;
    r.filename = "frame_" + std::to_string(i);
    r.timestamp_ms = static_cast<std::int64_t>(i) * interval_ms;
    r.label = labels.empty() ? std::string{} : labels[i % labels.size()];
    recs.push_back(std::move(r));
  }
  return Study(std::move(id), {}, std::move(recs), source);
}

}  // namespace hil

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

#include "hil/report.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "hil/atomic_file.hpp"
#include "hil/error.hpp"

namespace hil {

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::int64_t field_ps(const nlohmann::json& row, const char* key) { return row.at(key).get<std::int64_t>(); }

struct LaneAccum {
  std::size_t frames = 0;
  std::size_t timed = 0;
  __int128 first_chunk_sum = 0;
  __int128 transfer_sum = 0;
};

double mean_ms(__int128 sum_ps, std::size_t n) {
  if (n == 0) return 0.0;
  return static_cast<double>(static_cast<long double>(sum_ps) / static_cast<long double>(n) / 1e9L);
}

}  // namespace

RunData load_run(const std::filesystem::path& dir) {
  const auto summary = dir / "summary.json";
  const auto frames = dir / "frames.jsonl";
  if (!std::filesystem::is_regular_file(summary) || !std::filesystem::is_regular_file(frames)) {
    throw Error(ErrorCode::MissingRun, dir.string() + " does not hold summary.json and frames.jsonl");
  }
  RunData run;
  run.dir = dir;
  try {
    run.summary = nlohmann::json::parse(read_file(summary));
    std::istringstream in(read_file(frames));
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty()) run.frames.push_back(nlohmann::json::parse(line));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, dir.string() + ": " + e.what());
  }
  return run;
}

RunReport build_report(std::span<const RunData> runs) {
  RunReport r;
  std::map<unsigned, LaneAccum> lanes;
  std::size_t predicted = 0;
  std::size_t matches = 0;
  for (const auto& run : runs) {
    std::size_t flagged = 0;
    std::size_t corrupted = 0;
    std::uint64_t deviations = 0;
    std::size_t run_predicted = 0;
    std::size_t run_matches = 0;
    try {
      for (const auto& row : run.frames) {
        const auto idx = row.at("frame_index").get<std::uint64_t>();
        const auto dev = row.at("deviations").get<std::uint64_t>();
        auto& lane = lanes[row.at("lanes").get<unsigned>()];
        ++lane.frames;
        lane.transfer_sum += field_ps(row, "transfer_ps");
        if (!row.at("first_chunk_ps").is_null()) {
          ++lane.timed;
          lane.first_chunk_sum += field_ps(row, "first_chunk_ps") - field_ps(row, "request_ps");
        }
        if (row.at("flagged").get<bool>()) {
          ++flagged;
          r.flagged_indices.push_back(idx);
        }
        if (dev > 0) {
          ++corrupted;
          r.corrupted_indices.push_back(idx);
        }
        deviations += dev;
        if (!row.at("predicted").is_null()) {
          ++run_predicted;
          if (row.at("predicted") == row.at("label")) ++run_matches;
        }
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ParseError, run.dir.string() + "/frames.jsonl: " + e.what());
    }

    auto check = [&](const char* key, const nlohmann::json& mine) {
      if (!run.summary.contains(key) || run.summary[key] != mine) {
        r.inconsistencies.push_back(run.dir.string() + ": " + key + " differs from summary.json");
      }
    };
    check("frames", run.frames.size());
    check("flagged", flagged);
    check("corrupted", corrupted);
    check("total_deviations", deviations);
    if (run_predicted > 0) {
      check("classifier_accuracy", static_cast<double>(run_matches) / static_cast<double>(run_predicted));
    } else {
      check("classifier_accuracy", nullptr);
    }

    r.frames += run.frames.size();
    r.flagged += flagged;
    r.corrupted += corrupted;
    r.total_deviations += deviations;
    predicted += run_predicted;
    matches += run_matches;
  }
  if (predicted > 0) r.classifier_accuracy = static_cast<double>(matches) / static_cast<double>(predicted);
  for (const auto& [n, a] : lanes) {
    r.lanes.push_back({n, a.frames, a.timed, mean_ms(a.first_chunk_sum, a.timed), mean_ms(a.transfer_sum, a.frames)});
  }
  return r;
}

std::string render_report(const RunReport& r) {
  std::ostringstream out;
  out << "frames: " << r.frames << '\n';
  out << "flagged: " << r.flagged << '\n';
  out << "corrupted: " << r.corrupted << '\n';
  out << "clean: " << (r.frames - r.corrupted) << '\n';
  out << "total_deviations: " << r.total_deviations << '\n';
  out << "classifier_accuracy: " << (r.classifier_accuracy ? fixed(*r.classifier_accuracy, 4) : "n/a") << '\n';
  for (const auto& l : r.lanes) {
    out << "lanes " << l.lanes << ": " << l.frames << " frames, mean first chunk "
        << (l.timed ? fixed(l.mean_first_chunk_ms, 3) + " ms" : std::string("n/a")) << ", mean transfer "
        << fixed(l.mean_transfer_ms, 3) << " ms\n";
  }
  auto list = [&](const char* name, const std::vector<std::uint64_t>& v) {
    out << name << ':';
    for (auto i : v) out << ' ' << i;
    out << '\n';
  };
  list("flagged frames", r.flagged_indices);
  list("corrupted frames", r.corrupted_indices);
  if (r.inconsistencies.empty()) {
    out << "summary consistency: ok\n";
  } else {
    for (const auto& s : r.inconsistencies) out << "summary consistency: " << s << '\n';
  }
  return out.str();
}

std::string latency_histogram_csv(std::span<const RunData> runs, double bin_ms) {
  if (!(bin_ms > 0)) throw Error(ErrorCode::InvalidArgument, "histogram bin width must be positive");
  const auto bin_ps = static_cast<std::int64_t>(std::llround(bin_ms * 1e9));
  std::map<unsigned, std::map<std::int64_t, std::size_t>> bins;
  for (const auto& run : runs) {
    for (const auto& row : run.frames) {
      if (row.at("first_chunk_ps").is_null()) continue;
      const auto latency = field_ps(row, "first_chunk_ps") - field_ps(row, "request_ps");
      ++bins[row.at("lanes").get<unsigned>()][latency / bin_ps];
    }
  }
  std::ostringstream out;
  out << "lanes,bin_start_ms,bin_end_ms,count\n";
  for (const auto& [lanes, hist] : bins) {
    const auto lo = hist.begin()->first;
    const auto hi = hist.rbegin()->first;
    for (auto b = lo; b <= hi; ++b) {
      const auto it = hist.find(b);
      out << lanes << ',' << fixed(static_cast<double>(b * bin_ps) / 1e9, 6) << ','
          << fixed(static_cast<double>((b + 1) * bin_ps) / 1e9, 6) << ',' << (it == hist.end() ? 0 : it->second)
          << '\n';
    }
  }
  return out.str();
}

}  // namespace hil

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

// capsule-hil: convert | run | sweep | report
//
// Exit status: 0 success, 1 the campaign found corruption or broke an
// internal invariant (or convert skipped frames), 2 usage or input error.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "hil/atomic_file.hpp"
#include "hil/bayer_file.hpp"
#include "hil/campaign.hpp"
#include "hil/error.hpp"
#include "hil/frame_source.hpp"
#include "hil/power.hpp"
#include "hil/report.hpp"

namespace fs = std::filesystem;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string preset;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "JSON configuration document");
  cmd->add_option("--seed", c.seed, "top-level random seed");
  cmd->add_option("--out", c.out, "output location");
  cmd->add_option("--preset", c.preset, "nominal-75mhz | lowpower-5mhz")
      ->check(CLI::IsMember({"nominal-75mhz", "lowpower-5mhz"}));
}

hil::CampaignConfig load_config(const Common& c) {
  hil::CampaignConfig cfg;
  if (!c.preset.empty()) hil::apply_preset(cfg, c.preset);
  if (!c.config.empty()) {
    const fs::path path(c.config);
    if (!fs::exists(path)) throw hil::Error(hil::ErrorCode::ConfigError, "config not found: " + c.config);
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(hil::read_file(path));
    } catch (const nlohmann::json::exception& e) {
      throw hil::Error(hil::ErrorCode::ConfigError, c.config + ": " + e.what());
    }
    hil::apply_config_json(cfg, doc, path.parent_path());
    // an explicit --preset wins over the document's own preset and fields it sets
    if (!c.preset.empty()) hil::apply_preset(cfg, c.preset);
  }
  if (c.seed) cfg.seed = *c.seed;
  if (!c.out.empty()) cfg.out_dir = c.out;
  return cfg;
}

int cmd_convert(const Common& common, const std::string& manifest, const std::string& pattern, unsigned bit_depth) {
  hil::CampaignConfig cfg = load_config(common);
  if (!manifest.empty()) cfg.manifest = manifest;
  if (cfg.manifest.empty()) throw hil::Error(hil::ErrorCode::ConfigError, "convert needs --manifest");
  if (cfg.out_dir.empty()) throw hil::Error(hil::ErrorCode::ConfigError, "convert needs --out");
  if (!pattern.empty()) cfg.twin.profile.pattern = hil::parse_pattern(pattern);
  if (bit_depth) cfg.twin.profile.bit_depth = bit_depth;
  cfg.twin.profile.validate();

  hil::ManifestOptions opts = cfg.manifest_options;
  opts.decode_images = false;
  const hil::Study study = hil::load_manifest(cfg.manifest, opts);

  std::vector<hil::FrameRecord> converted;
  std::size_t failures = 0;
  for (const auto& r : study.frames()) {
    try {
      const hil::BayerImage img = hil::convert_frame(study, r, cfg.twin.profile);
      hil::FrameRecord out = r;
      out.filename = fs::path(r.filename).replace_extension(".bay").generic_string();
      hil::write_bayer_file(img, cfg.out_dir / out.filename);
      converted.push_back(out);
    } catch (const hil::Error& e) {
      ++failures;
      std::cerr << "frame " << r.index << " (" << r.filename << "): " << e.what() << '\n';
    }
  }
  if (failures > 0) {
    std::cerr << failures << " of " << study.size() << " frames failed; no index written\n";
    return 1;
  }
  const hil::Study cache(study.id(), cfg.out_dir, std::move(converted),
                         {cfg.twin.profile.width, cfg.twin.profile.height});
  hil::write_manifest(cache, cfg.out_dir / "index.csv");
  std::cout << "converted " << cache.size() << " frames into " << cfg.out_dir.string() << '\n';
  return 0;
}

int cmd_run(const Common& common, const std::string& manifest, std::optional<unsigned> lanes, bool synthetic,
            bool timing_only) {
  hil::CampaignConfig cfg = load_config(common);
  if (!manifest.empty()) cfg.manifest = manifest;
  if (lanes) cfg.link.lanes = *lanes;
  if (synthetic) cfg.source = hil::SourceKind::Synthetic;
  if (timing_only) cfg.timing_only = true;
  if (cfg.out_dir.empty()) throw hil::Error(hil::ErrorCode::ConfigError, "run needs --out");

  const hil::CampaignResult result = hil::run_campaign(cfg);
  hil::write_run(result, cfg, cfg.out_dir);
  const auto& rep = result.report;
  std::cout << "frames: " << rep.frames << "\nflagged: " << rep.flagged << "\ncorrupted: " << rep.corrupted
            << "\ninvariant violations: " << result.violations.size() << '\n';
  for (const auto& v : result.violations) std::cerr << "violation: " << v << '\n';
  return result.exit_code();
}

int cmd_sweep(const Common& common, std::optional<std::int64_t> clock, double start, double stop, double step,
              std::optional<double> p_active, std::optional<double> p_idle) {
  hil::CampaignConfig cfg = load_config(common);
  hil::PowerParams params = cfg.power.value_or(hil::PowerParams{});
  if (p_active) params.p_active_mw = *p_active;
  if (p_idle) params.p_idle_mw = *p_idle;
  params.validate();
  const std::int64_t clock_hz = clock.value_or(common.preset.empty() && common.config.empty() ? 5'000'000
                                                                                                : cfg.twin.clock_hz);
  if (!(step > 0)) throw hil::Error(hil::ErrorCode::ConfigError, "--step must be positive");
  if (start < 0) throw hil::Error(hil::ErrorCode::ConfigError, "--start must be non-negative");
  const auto fps = hil::fps_range(start, stop, step);
  const auto curve = hil::power_sweep(fps, clock_hz, params, cfg.twin.profile);
  const std::string csv = hil::sweep_csv(curve);
  if (cfg.out_dir.empty()) {
    std::cout << csv;
  } else {
    hil::write_file_atomic(cfg.out_dir, csv);
  }
  return 0;
}

int cmd_report(const std::vector<std::string>& dirs, const std::string& histogram, double bin_ms) {
  std::vector<hil::RunData> runs;
  for (const auto& d : dirs) runs.push_back(hil::load_run(d));
  const hil::RunReport rep = hil::build_report(runs);
  std::cout << hil::render_report(rep);
  const fs::path hist = histogram.empty() ? fs::path(dirs.front()) / "latency_histogram.csv" : fs::path(histogram);
  hil::write_file_atomic(hist, hil::latency_histogram_csv(runs, bin_ms));
  std::cout << "histogram: " << hist.string() << '\n';
  return rep.inconsistencies.empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete-event hardware-in-the-loop rig for capsule camera prototypes"};
  app.require_subcommand(1);

  Common convert_opts;
  std::string convert_manifest;
  std::string convert_pattern;
  unsigned convert_depth = 0;
  auto* convert = app.add_subcommand("convert", "resize and mosaic a study into BAY1 files plus index.csv");
  add_common(convert, convert_opts);
  convert->add_option("--manifest", convert_manifest, "study manifest CSV");
  convert->add_option("--pattern", convert_pattern, "RGGB | BGGR | GRBG | GBRG");
  convert->add_option("--bit-depth", convert_depth, "sample depth")->check(CLI::Range(8u, 16u));

  Common run_opts;
  std::string run_manifest;
  std::optional<unsigned> run_lanes;
  bool run_synthetic = false;
  bool run_timing_only = false;
  auto* run = app.add_subcommand("run", "execute a verification campaign");
  add_common(run, run_opts);
  run->add_option("--manifest", run_manifest, "study manifest CSV");
  run->add_option("--lanes", run_lanes, "link lanes (1, 2 or 4)");
  run->add_flag("--synthetic", run_synthetic, "inject procedural frames instead of the study's files");
  run->add_flag("--timing-only", run_timing_only, "time the schedule without moving pixel data");

  Common sweep_opts;
  std::optional<std::int64_t> sweep_clock;
  double sweep_start = 0.1;
  double sweep_stop = 4.0;
  double sweep_step = 0.1;
  std::optional<double> sweep_active;
  std::optional<double> sweep_idle;
  auto* sweep = app.add_subcommand("sweep", "power versus frame rate as CSV");
  add_common(sweep, sweep_opts);
  sweep->add_option("--clock", sweep_clock, "sensor clock in Hz (default 5 MHz)");
  sweep->add_option("--start", sweep_start, "first fps");
  sweep->add_option("--stop", sweep_stop, "last fps (inclusive)");
  sweep->add_option("--step", sweep_step, "fps increment");
  sweep->add_option("--p-active", sweep_active, "active power in mW");
  sweep->add_option("--p-idle", sweep_idle, "idle power in mW");

  std::vector<std::string> report_dirs;
  std::string report_hist;
  double report_bin = 0.5;
  auto* report = app.add_subcommand("report", "summarise one or more run directories");
  report->add_option("runs", report_dirs, "run directories")->required();
  report->add_option("--histogram", report_hist, "histogram CSV path (default <first run>/latency_histogram.csv)");
  report->add_option("--bin-ms", report_bin, "histogram bin width in ms");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and --version exit 0; every usage error maps to the error code
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*convert) return cmd_convert(convert_opts, convert_manifest, convert_pattern, convert_depth);
    if (*run) return cmd_run(run_opts, run_manifest, run_lanes, run_synthetic, run_timing_only);
    if (*sweep) return cmd_sweep(sweep_opts, sweep_clock, sweep_start, sweep_stop, sweep_step, sweep_active, sweep_idle);
    if (*report) return cmd_report(report_dirs, report_hist, report_bin);
  } catch (const hil::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}

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

// The JSON configuration document. Durations are written in milliseconds
// (fractional values allowed) and converted to whole picoseconds.

#include <cmath>
#include <initializer_list>
#include <limits>
#include <string_view>

#include "hil/campaign.hpp"
#include "hil/error.hpp"

namespace hil {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::ConfigError, what); }

void only_keys(const json& obj, std::string_view where, std::initializer_list<std::string_view> keys) {
  if (!obj.is_object()) bad(std::string(where) + ": expected an object");
  for (const auto& [k, v] : obj.items()) {
    bool known = false;
    for (auto allowed : keys) known = known || k == allowed;
    if (!known) bad(std::string(where) + ": unknown key '" + k + "'");
  }
}

double number(const json& v, const std::string& key) {
  if (!v.is_number()) bad(key + ": expected a number");
  return v.get<double>();
}

std::int64_t integer(const json& v, const std::string& key) {
  if (!v.is_number_integer()) bad(key + ": expected an integer");
  return v.get<std::int64_t>();
}

std::uint64_t unsigned_integer(const json& v, const std::string& key) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  bad(key + ": expected a non-negative integer");
}

bool boolean(const json& v, const std::string& key) {
  if (!v.is_boolean()) bad(key + ": expected true or false");
  return v.get<bool>();
}

std::string text(const json& v, const std::string& key) {
  if (!v.is_string()) bad(key + ": expected a string");
  return v.get<std::string>();
}

SimTime millis(const json& v, const std::string& key) {
  const double ms = number(v, key);
  if (!(ms >= 0) || ms > 9.2e9) bad(key + ": duration out of range");
  return SimTime::from_ps(std::llround(ms * 1e9));
}

double to_ms(SimTime t) { return static_cast<double>(t.ps()) / 1e9; }

std::filesystem::path resolve(const std::filesystem::path& p, const std::filesystem::path& base) {
  return p.empty() || p.is_absolute() || base.empty() ? p : base / p;
}

void read_sensor(TwinConfig& t, const json& s) {
  only_keys(s, "sensor",
            {"clock_hz", "deadline_ms", "discard_first_frame", "width", "height", "bit_depth", "idle_to_tx_cycles",
             "frame_cycle_cycles", "cycles_per_pixel", "pattern", "exposure_offset_cycles"});
  auto& p = t.profile;
  if (s.contains("clock_hz")) t.clock_hz = integer(s["clock_hz"], "sensor.clock_hz");
  if (s.contains("deadline_ms")) {
    if (s["deadline_ms"].is_null()) {
      t.deadline.reset();
    } else {
      t.deadline = millis(s["deadline_ms"], "sensor.deadline_ms");
    }
  }
  if (s.contains("discard_first_frame")) t.discard_first_frame = boolean(s["discard_first_frame"], "sensor.discard_first_frame");
  if (s.contains("width")) p.width = unsigned_integer(s["width"], "sensor.width");
  if (s.contains("height")) p.height = unsigned_integer(s["height"], "sensor.height");
  if (s.contains("bit_depth")) p.bit_depth = static_cast<unsigned>(unsigned_integer(s["bit_depth"], "sensor.bit_depth"));
  if (s.contains("idle_to_tx_cycles")) p.idle_to_tx_cycles = integer(s["idle_to_tx_cycles"], "sensor.idle_to_tx_cycles");
  if (s.contains("frame_cycle_cycles")) p.frame_cycle_cycles = integer(s["frame_cycle_cycles"], "sensor.frame_cycle_cycles");
  if (s.contains("cycles_per_pixel")) p.cycles_per_pixel = integer(s["cycles_per_pixel"], "sensor.cycles_per_pixel");
  if (s.contains("exposure_offset_cycles")) {
    p.exposure_offset_cycles = integer(s["exposure_offset_cycles"], "sensor.exposure_offset_cycles");
  }
  if (s.contains("pattern")) {
    try {
      p.pattern = parse_pattern(text(s["pattern"], "sensor.pattern"));
    } catch (const Error& e) {
      bad(std::string("sensor.pattern: ") + e.what());
    }
  }
}

void read_link(LinkConfig& l, const json& s) {
  only_keys(s, "link",
            {"lanes", "clock_hz", "per_call_overhead_ms", "calls_per_image", "bits_per_pixel_on_wire", "chunk_pixels"});
  if (s.contains("lanes")) l.lanes = static_cast<unsigned>(unsigned_integer(s["lanes"], "link.lanes"));
  if (s.contains("clock_hz")) l.link_clock_hz = integer(s["clock_hz"], "link.clock_hz");
  if (s.contains("per_call_overhead_ms")) l.per_call_overhead = millis(s["per_call_overhead_ms"], "link.per_call_overhead_ms");
  if (s.contains("calls_per_image")) {
    l.calls_per_image = static_cast<unsigned>(unsigned_integer(s["calls_per_image"], "link.calls_per_image"));
  }
  if (s.contains("bits_per_pixel_on_wire")) {
    l.bits_per_pixel_on_wire = static_cast<unsigned>(unsigned_integer(s["bits_per_pixel_on_wire"], "link.bits_per_pixel_on_wire"));
  }
  if (s.contains("chunk_pixels")) l.chunk_pixels = unsigned_integer(s["chunk_pixels"], "link.chunk_pixels");
}

void read_faults(FaultConfig& f, const json& s) {
  only_keys(s, "faults", {"distribution", "lo_ms", "hi_ms"});
  if (s.contains("distribution")) {
    const auto d = text(s["distribution"], "faults.distribution");
    if (d == "none") {
      f.distribution = DelayDistribution::None;
    } else if (d == "uniform") {
      f.distribution = DelayDistribution::Uniform;
    } else {
      bad("faults.distribution: expected none or uniform");
    }
  }
  if (s.contains("lo_ms")) f.lo = millis(s["lo_ms"], "faults.lo_ms");
  if (s.contains("hi_ms")) f.hi = millis(s["hi_ms"], "faults.hi_ms");
}

void read_provider(ProviderConfig& p, const json& s) {
  only_keys(s, "provider", {"load_ms", "convert_ms", "jitter_ms", "end_policy"});
  if (s.contains("load_ms")) p.load_time = millis(s["load_ms"], "provider.load_ms");
  if (s.contains("convert_ms")) p.convert_time = millis(s["convert_ms"], "provider.convert_ms");
  if (s.contains("jitter_ms")) p.jitter = millis(s["jitter_ms"], "provider.jitter_ms");
  if (s.contains("end_policy")) {
    const auto e = text(s["end_policy"], "provider.end_policy");
    if (e == "hold-last") {
      p.end_policy = EndPolicy::HoldLast;
    } else if (e == "raise-end") {
      p.end_policy = EndPolicy::RaiseEnd;
    } else {
      bad("provider.end_policy: expected hold-last or raise-end");
    }
  }
}

void read_dut(CampaignConfig& cfg, const json& s, const std::filesystem::path& base) {
  only_keys(s, "dut", {"readout_clock_hz", "classifier"});
  if (s.contains("readout_clock_hz")) {
    if (s["readout_clock_hz"].is_null()) {
      cfg.dut.readout_clock_hz.reset();
    } else {
      cfg.dut.readout_clock_hz = integer(s["readout_clock_hz"], "dut.readout_clock_hz");
    }
  }
  if (!s.contains("classifier")) return;
  const json& c = s["classifier"];
  cfg.classifier_table.clear();
  if (c.is_string()) {
    const auto k = c.get<std::string>();
    if (k == "none") {
      cfg.dut.classifier = ClassifierHook::none();
    } else if (k == "oracle") {
      cfg.dut.classifier = ClassifierHook::oracle();
    } else {
      bad("dut.classifier: expected none, oracle, {\"constant\": label} or {\"table\": path}");
    }
  } else if (c.is_object() && c.size() == 1 && c.contains("constant")) {
    cfg.dut.classifier = ClassifierHook::constant(text(c["constant"], "dut.classifier.constant"));
  } else if (c.is_object() && c.size() == 1 && c.contains("table")) {
    cfg.classifier_table = resolve(text(c["table"], "dut.classifier.table"), base);
    if (!std::filesystem::exists(cfg.classifier_table)) bad("classifier table not found: " + cfg.classifier_table.string());
    cfg.dut.classifier = ClassifierHook::load_table(cfg.classifier_table);
  } else {
    bad("dut.classifier: expected none, oracle, {\"constant\": label} or {\"table\": path}");
  }
}

void read_capture(CapturePlan& c, const json& s) {
  only_keys(s, "capture", {"mode", "fps", "count", "timestamps_ms"});
  if (s.contains("mode")) {
    const auto m = text(s["mode"], "capture.mode");
    if (m == "study") {
      c.mode = CapturePlan::Mode::Study;
    } else if (m == "fps") {
      c.mode = CapturePlan::Mode::Fps;
    } else if (m == "timestamps") {
      c.mode = CapturePlan::Mode::Timestamps;
    } else {
      bad("capture.mode: expected study, fps or timestamps");
    }
  }
  if (s.contains("fps")) c.fps = number(s["fps"], "capture.fps");
  if (s.contains("count")) c.count = unsigned_integer(s["count"], "capture.count");
  if (s.contains("timestamps_ms")) {
    if (!s["timestamps_ms"].is_array()) bad("capture.timestamps_ms: expected an array");
    c.timestamps_ms.clear();
    for (const auto& v : s["timestamps_ms"]) c.timestamps_ms.push_back(integer(v, "capture.timestamps_ms"));
  }
}

}  // namespace

void apply_preset(CampaignConfig& cfg, const std::string& name) {
  if (name == "nominal-75mhz") {
    cfg.twin.clock_hz = 75'000'000;
    cfg.twin.deadline.reset();
    cfg.link = LinkConfig{};
    cfg.faults.distribution = DelayDistribution::None;
    cfg.capture.mode = CapturePlan::Mode::Study;
  } else if (name == "lowpower-5mhz") {
    cfg.twin.clock_hz = 5'000'000;
    cfg.twin.deadline = SimTime::from_ms(120);
    cfg.link = LinkConfig{};
    cfg.capture.mode = CapturePlan::Mode::Fps;
    cfg.capture.fps = 1.0;
    if (!cfg.power) cfg.power = PowerParams{};
  } else {
    bad("unknown preset '" + name + "' (expected nominal-75mhz or lowpower-5mhz)");
  }
}

void apply_config_json(CampaignConfig& cfg, const nlohmann::json& doc, const std::filesystem::path& base_dir) {
  only_keys(doc, "config",
            {"preset", "seed", "study", "sensor", "link", "faults", "provider", "dut", "power", "capture", "out",
             "timing_only"});
  if (doc.contains("preset")) apply_preset(cfg, text(doc["preset"], "preset"));
  if (doc.contains("seed")) cfg.seed = unsigned_integer(doc["seed"], "seed");
  if (doc.contains("study")) {
    const json& s = doc["study"];
    only_keys(s, "study", {"manifest", "synthetic_fps", "source"});
    if (s.contains("manifest")) cfg.manifest = resolve(text(s["manifest"], "study.manifest"), base_dir);
    if (s.contains("synthetic_fps")) cfg.manifest_options.synthetic_fps = number(s["synthetic_fps"], "study.synthetic_fps");
    if (s.contains("source")) {
      const auto k = text(s["source"], "study.source");
      if (k == "files") {
        cfg.source = SourceKind::Files;
      } else if (k == "synthetic") {
        cfg.source = SourceKind::Synthetic;
      } else {
        bad("study.source: expected files or synthetic");
      }
    }
  }
  if (doc.contains("sensor")) read_sensor(cfg.twin, doc["sensor"]);
  if (doc.contains("link")) read_link(cfg.link, doc["link"]);
  if (doc.contains("faults")) read_faults(cfg.faults, doc["faults"]);
  if (doc.contains("provider")) read_provider(cfg.provider, doc["provider"]);
  if (doc.contains("dut")) read_dut(cfg, doc["dut"], base_dir);
  if (doc.contains("power")) {
    const json& p = doc["power"];
    if (p.is_null()) {
      cfg.power.reset();
    } else {
      only_keys(p, "power", {"p_active_mw", "p_idle_mw"});
      PowerParams pp = cfg.power.value_or(PowerParams{});
      if (p.contains("p_active_mw")) pp.p_active_mw = number(p["p_active_mw"], "power.p_active_mw");
      if (p.contains("p_idle_mw")) pp.p_idle_mw = number(p["p_idle_mw"], "power.p_idle_mw");
      cfg.power = pp;
    }
  }
  if (doc.contains("capture")) read_capture(cfg.capture, doc["capture"]);
  if (doc.contains("out")) cfg.out_dir = resolve(text(doc["out"], "out"), base_dir);
  if (doc.contains("timing_only")) cfg.timing_only = boolean(doc["timing_only"], "timing_only");
}

nlohmann::ordered_json config_to_json(const CampaignConfig& cfg) {
  ojson j;
  j["seed"] = cfg.seed;
  j["study"] = {{"manifest", cfg.manifest.generic_string()},
                {"synthetic_fps", cfg.manifest_options.synthetic_fps},
                {"source", cfg.source == SourceKind::Files ? "files" : "synthetic"}};
  const auto& p = cfg.twin.profile;
  j["sensor"] = {{"clock_hz", cfg.twin.clock_hz},
                 {"deadline_ms", cfg.twin.deadline ? ojson(to_ms(*cfg.twin.deadline)) : ojson(nullptr)},
                 {"discard_first_frame", cfg.twin.discard_first_frame},
                 {"width", p.width},
                 {"height", p.height},
                 {"bit_depth", p.bit_depth},
                 {"idle_to_tx_cycles", p.idle_to_tx_cycles},
                 {"frame_cycle_cycles", p.frame_cycle_cycles},
                 {"cycles_per_pixel", p.cycles_per_pixel},
                 {"pattern", to_string(p.pattern)},
                 {"exposure_offset_cycles", p.exposure_offset_cycles}};
  j["link"] = {{"lanes", cfg.link.lanes},
               {"clock_hz", cfg.link.link_clock_hz},
               {"per_call_overhead_ms", to_ms(cfg.link.per_call_overhead)},
               {"calls_per_image", cfg.link.calls_per_image},
               {"bits_per_pixel_on_wire", cfg.link.bits_per_pixel_on_wire},
               {"chunk_pixels", cfg.link.chunk_pixels}};
  j["faults"] = {{"distribution", cfg.faults.distribution == DelayDistribution::None ? "none" : "uniform"},
                 {"lo_ms", to_ms(cfg.faults.lo)},
                 {"hi_ms", to_ms(cfg.faults.hi)}};
  j["provider"] = {{"load_ms", to_ms(cfg.provider.load_time)},
                   {"convert_ms", to_ms(cfg.provider.convert_time)},
                   {"jitter_ms", to_ms(cfg.provider.jitter)},
                   {"end_policy", cfg.provider.end_policy == EndPolicy::HoldLast ? "hold-last" : "raise-end"}};
  ojson classifier;
  switch (cfg.dut.classifier.kind()) {
    case ClassifierHook::Kind::None:
      classifier = "none";
      break;
    case ClassifierHook::Kind::Oracle:
      classifier = "oracle";
      break;
    case ClassifierHook::Kind::Constant:
      classifier = {{"constant", cfg.dut.classifier.constant_label()}};
      break;
    case ClassifierHook::Kind::Table:
      classifier = {{"table", cfg.classifier_table.generic_string()}};
      break;
  }
  j["dut"] = {{"readout_clock_hz", cfg.dut.readout_clock_hz ? ojson(*cfg.dut.readout_clock_hz) : ojson(nullptr)},
              {"classifier", classifier}};
  if (cfg.power) {
    j["power"] = {{"p_active_mw", cfg.power->p_active_mw}, {"p_idle_mw", cfg.power->p_idle_mw}};
  } else {
    j["power"] = nullptr;
  }
  ojson cap;
  switch (cfg.capture.mode) {
    case CapturePlan::Mode::Study:
      cap = {{"mode", "study"}};
      break;
    case CapturePlan::Mode::Fps:
      cap = {{"mode", "fps"}, {"fps", cfg.capture.fps}, {"count", cfg.capture.count}};
      break;
    case CapturePlan::Mode::Timestamps:
      cap = {{"mode", "timestamps"}, {"timestamps_ms", cfg.capture.timestamps_ms}};
      break;
  }
  j["capture"] = cap;
  j["timing_only"] = cfg.timing_only;
  return j;
}

}  // namespace hil

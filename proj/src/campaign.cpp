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

#include "hil/campaign.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

#include "hil/atomic_file.hpp"
#include "hil/error.hpp"

namespace hil {

void CampaignConfig::validate() const {
  twin.validate();
  link.validate(twin.profile.pixel_count());
  faults.validate();
  if (power) power->validate();
  if (dut.readout_clock_hz && *dut.readout_clock_hz <= 0) {
    throw Error(ErrorCode::ConfigError, "DUT readout clock must be positive");
  }
  switch (capture.mode) {
    case CapturePlan::Mode::Study:
      break;
    case CapturePlan::Mode::Fps:
      if (!(capture.fps > 0.0)) throw Error(ErrorCode::ConfigError, "capture fps must be positive");
      break;
    case CapturePlan::Mode::Timestamps:
      for (auto ts : capture.timestamps_ms) {
        if (ts < 0) throw Error(ErrorCode::ConfigError, "capture timestamps must be non-negative");
      }
      break;
  }
}

bool link_keeps_pace(const TransferPlan& plan, const TwinConfig& twin) {
  if (plan.chunk_arrivals.empty()) return true;
  const SimTime first = plan.chunk_arrivals.front().arrival;
  for (const auto& c : plan.chunk_arrivals) {
    const SimTime offset =
        cycles_to_ps(static_cast<std::int64_t>(c.begin) * twin.profile.cycles_per_pixel, twin.clock_hz);
    if (c.arrival - first > offset) return false;
  }
  return true;
}

namespace {

struct InFlight {
  std::uint64_t capture = 0;
  const FrameRecord* record = nullptr;
  CaptureSchedule schedule;
  TransferPlan plan;
  BayerImage injected;
  std::vector<std::uint16_t> wire;
  SimTime injected_delay;
  std::size_t chunks_ingested = 0;
  bool readout_done = false;
  std::optional<bool> deadline_missed;
  bool keeps_pace = true;
};

std::vector<SimTime> request_times(const CampaignConfig& cfg, const Study& study) {
  std::vector<SimTime> out;
  switch (cfg.capture.mode) {
    case CapturePlan::Mode::Study:
      for (const auto& r : study.frames()) out.push_back(SimTime::from_ms(r.timestamp_ms));
      break;
    case CapturePlan::Mode::Fps: {
      const std::size_t n = cfg.capture.count ? cfg.capture.count : study.size();
      for (std::size_t k = 0; k < n; ++k) out.push_back(SimTime::from_seconds(static_cast<double>(k) / cfg.capture.fps));
      break;
    }
    case CapturePlan::Mode::Timestamps:
      for (auto ms : cfg.capture.timestamps_ms) out.push_back(SimTime::from_ms(ms));
      std::sort(out.begin(), out.end());
      break;
  }
  return out;
}

class CampaignRunner {
 public:
  CampaignRunner(const CampaignConfig& cfg, const Study& study, FrameSource& source)
      : cfg_(cfg), study_(study), source_(source), twin_(cfg.twin), wire_bits_(std::min(cfg.link.bits_per_pixel_on_wire,
                                                                                          cfg.twin.profile.bit_depth)) {
    faults_ = cfg.faults;
    faults_.seed = cfg.seed;
  }

  CampaignResult run() {
    const auto requests = request_times(cfg_, study_);
    for (std::size_t k = 0; k < requests.size(); ++k) {
      sched_.schedule(requests[k], EventKind::CaptureRequest, {k, 0});
    }
    sched_.run_all([this](const SimEvent& ev, Scheduler& s) { handle(ev, s); });

    CampaignResult r;
    r.seed = cfg_.seed;
    r.study_id = study_.id();
    r.frames = std::move(logs_);
    r.verdicts = std::move(verdicts_);
    r.violations = std::move(violations_);

    SimTime horizon = std::max(sched_.now(), twin_.idle_from());
    if (cfg_.capture.mode == CapturePlan::Mode::Fps && !requests.empty()) {
      horizon = std::max(horizon, SimTime::from_seconds(static_cast<double>(requests.size()) / cfg_.capture.fps));
    }
    r.activity = twin_.activity_until(horizon);
    const auto& a = r.activity;
    if (a.idle() + a.active() != a.end() - a.start()) {
      r.violations.push_back("activity ledger does not cover the simulated span");
    }
    if (!r.verdicts.empty()) {
      r.report = summarize(r.verdicts);
      if (cfg_.power && (a.end() - a.start()).ps() > 0) r.report.power = estimate_power(a, *cfg_.power);
    }
    return r;
  }

 private:
  void handle(const SimEvent& ev, Scheduler& s) {
    switch (ev.kind) {
      case EventKind::CaptureRequest:
        on_request(ev.payload.frame, s);
        break;
      case EventKind::ChunkArrival:
        on_chunk(ev.payload.aux, s);
        break;
      case EventKind::ReadoutPixelWindow:
        break;
      case EventKind::ReadoutComplete:
        flight_->readout_done = true;
        try_finalize(s);
        break;
      case EventKind::DeadlineCheck:
        if (flight_ && flight_->capture == ev.payload.frame) flight_->deadline_missed = flight_->chunks_ingested == 0;
        break;
    }
  }

  void on_request(std::uint64_t capture, Scheduler& s) {
    if (flight_) {
      pending_.push_back(capture);
      return;
    }
    if (s.now() < twin_.idle_from()) {
      s.schedule(twin_.idle_from(), EventKind::CaptureRequest, {capture, 1});
      return;
    }
    start_capture(capture, s);
  }

  void start_capture(std::uint64_t capture, Scheduler& s) {
    const SimTime now = s.now();
    InFlight f;
    f.capture = capture;
    f.schedule = twin_.begin_capture(now);
    f.record = &frame_at(study_, now, cfg_.provider.end_policy);
    f.injected_delay = sample_injected_delay(faults_, capture);
    const std::size_t n = cfg_.twin.profile.pixel_count();
    f.plan = plan_transfer(cfg_.link, f.injected_delay, now, n, provider_latency(cfg_.provider, cfg_.seed, capture));
    f.keeps_pace = link_keeps_pace(f.plan, cfg_.twin);
    if (!cfg_.timing_only) {
      f.injected = source_.mosaic(study_, *f.record);
      f.wire = to_wire(f.injected.samples(), cfg_.twin.profile.bit_depth, wire_bits_);
    }
    for (std::size_t j = 0; j < f.plan.chunk_arrivals.size(); ++j) {
      s.schedule(f.plan.chunk_arrivals[j].arrival, EventKind::ChunkArrival, {capture, j});
    }
    s.schedule(now + cfg_.twin.effective_deadline(), EventKind::DeadlineCheck, {capture, 0});
    s.schedule(f.schedule.usable_readout_start, EventKind::ReadoutPixelWindow, {capture, 0});
    s.schedule(f.schedule.usable_readout_end, EventKind::ReadoutComplete, {capture, 0});
    flight_ = std::move(f);
  }

  void on_chunk(std::size_t j, Scheduler& s) {
    const auto& c = flight_->plan.chunk_arrivals[j];
    if (cfg_.timing_only) {
      twin_.account_chunk(c.end - c.begin, s.now());
    } else {
      const std::span<const std::uint16_t> all(flight_->wire);
      twin_.ingest_chunk(all.subspan(c.begin, c.end - c.begin), s.now(), wire_bits_);
    }
    ++flight_->chunks_ingested;
    try_finalize(s);
  }

  void try_finalize(Scheduler& s) {
    InFlight& f = *flight_;
    if (!f.readout_done || f.chunks_ingested != f.plan.chunk_arrivals.size()) return;

    FrameOutcome outcome = twin_.finalize_frame(s.now());
    FrameLog log;
    log.capture = f.capture;
    log.frame_index = f.record->index;
    log.request = f.schedule.interrupt_at;
    if (outcome.first_chunk_latency) log.first_chunk = f.schedule.interrupt_at + *outcome.first_chunk_latency;
    log.complete = f.plan.chunk_arrivals.back().arrival;
    log.deadline = f.schedule.interrupt_at + cfg_.twin.effective_deadline();
    log.flagged = outcome.flagged;
    log.underrun = outcome.underrun_count;
    log.label = f.record->label;
    log.lanes = cfg_.link.lanes;
    log.injected_delay = f.injected_delay;
    log.transfer = f.plan.total_duration;
    log.usable_readout_start = f.schedule.usable_readout_start;

    FrameVerdict verdict;
    if (cfg_.timing_only) {
      verdict.frame_index = f.record->index;
      verdict.flagged = outcome.flagged;
      verdict.underrun_count = outcome.underrun_count;
      verdict.label = f.record->label;
      verdict.first_chunk_latency = outcome.first_chunk_latency;
      log.dut_complete = f.schedule.usable_readout_end;
    } else {
      const CapturedImage captured = dut_receive(cfg_.dut, outcome.served, f.schedule, cfg_.twin);
      const auto predicted = classify(cfg_.dut.classifier, captured.image, *f.record);
      verdict = verify_frame(f.injected, captured.image, outcome, *f.record, predicted);
      log.deviations = verdict.deviations;
      log.predicted = predicted;
      log.dut_complete = captured.completion;
    }
    check_invariants(f, log);
    logs_.push_back(std::move(log));
    verdicts_.push_back(std::move(verdict));
    flight_.reset();

    if (!pending_.empty()) {
      const std::uint64_t next = pending_.front();
      pending_.pop_front();
      s.schedule(std::max(s.now(), twin_.idle_from()), EventKind::CaptureRequest, {next, 1});
    }
  }

  void check_invariants(const InFlight& f, const FrameLog& log) {
    auto fail = [&](const std::string& what) {
      violations_.push_back("capture " + std::to_string(f.capture) + " (frame " + std::to_string(log.frame_index) +
                            "): " + what);
    };
    if (!f.deadline_missed || *f.deadline_missed != log.flagged) {
      fail("flag disagrees with the deadline check");
    }
    if (log.deviations > log.underrun) fail("more pixel deviations than underrun pixels");
    if (log.underrun > cfg_.twin.profile.pixel_count()) fail("underrun exceeds the frame size");
    if (cfg_.twin.deadline_within_window() && f.keeps_pace && !log.flagged && log.underrun != 0) {
      fail("frame met its deadline but underran");
    }
  }

  const CampaignConfig& cfg_;
  const Study& study_;
  FrameSource& source_;
  SensorTwin twin_;
  FaultConfig faults_;
  unsigned wire_bits_;
  Scheduler sched_;
  std::optional<InFlight> flight_;
  std::deque<std::uint64_t> pending_;
  std::vector<FrameLog> logs_;
  std::vector<FrameVerdict> verdicts_;
  std::vector<std::string> violations_;
};

}  // namespace

CampaignResult run_campaign(const CampaignConfig& cfg, const Study& study, FrameSource& source) {
  cfg.validate();
  CampaignRunner runner(cfg, study, source);
  return runner.run();
}

CampaignResult run_campaign(const CampaignConfig& cfg) {
  if (cfg.manifest.empty()) throw Error(ErrorCode::ConfigError, "no study manifest configured");
  if (!std::filesystem::exists(cfg.manifest)) {
    throw Error(ErrorCode::ConfigError, "study manifest not found: " + cfg.manifest.string());
  }
  ManifestOptions opts = cfg.manifest_options;
  if (cfg.source == SourceKind::Synthetic || cfg.timing_only) opts.decode_images = false;
  const Study study = load_manifest(cfg.manifest, opts);
  if (cfg.source == SourceKind::Synthetic) {
    SyntheticFrameSource src(cfg.twin.profile);
    return run_campaign(cfg, study, src);
  }
  FileFrameSource src(cfg.twin.profile);
  return run_campaign(cfg, study, src);
}

nlohmann::ordered_json frame_log_json(const FrameLog& f) {
  nlohmann::ordered_json j;
  j["frame_index"] = f.frame_index;
  j["request_ps"] = f.request.ps();
  j["first_chunk_ps"] = f.first_chunk ? nlohmann::ordered_json(f.first_chunk->ps()) : nlohmann::ordered_json(nullptr);
  j["complete_ps"] = f.complete.ps();
  j["deadline_ps"] = f.deadline.ps();
  j["flagged"] = f.flagged;
  j["underrun"] = f.underrun;
  j["deviations"] = f.deviations;
  j["label"] = f.label;
  j["predicted"] = f.predicted ? nlohmann::ordered_json(*f.predicted) : nlohmann::ordered_json(nullptr);
  j["capture"] = f.capture;
  j["lanes"] = f.lanes;
  j["injected_delay_ps"] = f.injected_delay.ps();
  j["transfer_ps"] = f.transfer.ps();
  j["readout_start_ps"] = f.usable_readout_start.ps();
  j["dut_complete_ps"] = f.dut_complete.ps();
  return j;
}

nlohmann::ordered_json summary_json(const CampaignResult& r, const CampaignConfig& cfg) {
  using oj = nlohmann::ordered_json;
  oj j;
  j["seed"] = r.seed;
  j["study"] = r.study_id;
  j["frames"] = r.report.frames;
  j["flagged"] = r.report.flagged;
  j["corrupted"] = r.report.corrupted;
  j["clean"] = r.report.frames - r.report.corrupted;
  j["total_deviations"] = r.report.total_deviations;
  j["classifier_accuracy"] = r.report.classifier_accuracy ? oj(*r.report.classifier_accuracy) : oj(nullptr);
  if (r.report.latency) {
    j["latency"] = {{"min_ps", r.report.latency->min.ps()},
                    {"mean_ps", r.report.latency->mean_ps},
                    {"max_ps", r.report.latency->max.ps()}};
  } else {
    j["latency"] = nullptr;
  }
  if (r.report.power) {
    j["power"] = {{"average_mw", r.report.power->average_mw}, {"active_fraction", r.report.power->active_fraction}};
  } else {
    j["power"] = nullptr;
  }
  j["activity"] = {{"idle_ps", r.activity.idle().ps()}, {"active_ps", r.activity.active().ps()}};
  j["invariant_violations"] = r.violations.size();
  j["violations"] = r.violations;
  j["exit_code"] = r.exit_code();
  j["config"] = config_to_json(cfg);
  return j;
}

void write_run(const CampaignResult& r, const CampaignConfig& cfg, const std::filesystem::path& dir) {
  std::ostringstream lines;
  for (const auto& f : r.frames) lines << frame_log_json(f).dump() << '\n';
  write_file_atomic(dir / "frames.jsonl", lines.str());
  write_file_atomic(dir / "summary.json", summary_json(r, cfg).dump(2) + "\n");
}

}  // namespace hil

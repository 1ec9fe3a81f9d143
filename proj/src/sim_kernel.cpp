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

#include "hil/sim_kernel.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "hil/error.hpp"

namespace hil {

namespace {
constexpr std::int64_t kPsPerSecond = 1'000'000'000'000;
}

SimTime SimTime::from_ps(std::int64_t ps) {
  if (ps < 0) throw Error(ErrorCode::InvalidArgument, "negative SimTime " + std::to_string(ps));
  SimTime t;
  t.ps_ = ps;
  return t;
}

SimTime SimTime::from_seconds(double seconds) {
  if (!(seconds >= 0.0) || seconds * 1e12 > static_cast<double>(std::numeric_limits<std::int64_t>::max())) {
    throw Error(ErrorCode::InvalidArgument, "time out of range: " + std::to_string(seconds) + " s");
  }
  return from_ps(static_cast<std::int64_t>(std::floor(seconds * 1e12 + 0.5)));
}

SimTime SimTime::operator+(SimTime rhs) const { return from_ps(ps_ + rhs.ps_); }

SimTime SimTime::operator-(SimTime rhs) const {
  if (rhs.ps_ > ps_) {
    throw Error(ErrorCode::InvalidArgument,
                "SimTime subtraction underflow: " + std::to_string(ps_) + " - " + std::to_string(rhs.ps_));
  }
  return from_ps(ps_ - rhs.ps_);
}

SimTime& SimTime::operator+=(SimTime rhs) {
  ps_ += rhs.ps_;
  return *this;
}

SimTime cycles_to_ps(std::int64_t cycles, std::int64_t clock_hz) {
  if (clock_hz <= 0) throw Error(ErrorCode::InvalidClock, "clock must be positive, got " + std::to_string(clock_hz));
  if (cycles < 0) throw Error(ErrorCode::InvalidArgument, "negative cycle count");
  const __int128 num = static_cast<__int128>(cycles) * kPsPerSecond;
  const __int128 den = clock_hz;
  const __int128 rounded = (2 * num + den) / (2 * den);
  if (rounded > std::numeric_limits<std::int64_t>::max()) {
    throw Error(ErrorCode::OutOfRange, "cycle count overflows the timeline");
  }
  return SimTime::from_ps(static_cast<std::int64_t>(rounded));
}

std::int64_t ps_to_cycles_ceil(SimTime t, std::int64_t clock_hz) {
  if (clock_hz <= 0) throw Error(ErrorCode::InvalidClock, "clock must be positive, got " + std::to_string(clock_hz));
  const __int128 num = static_cast<__int128>(t.ps()) * clock_hz;
  return static_cast<std::int64_t>((num + kPsPerSecond - 1) / kPsPerSecond);
}

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::CaptureRequest: return "capture-request";
    case EventKind::ChunkArrival: return "chunk-arrival";
    case EventKind::ReadoutPixelWindow: return "readout-pixel-window";
    case EventKind::ReadoutComplete: return "readout-complete";
    case EventKind::DeadlineCheck: return "deadline-check";
  }
  return "unknown";
}

EventId Scheduler::schedule(SimTime due, EventKind kind, EventPayload payload) {
  if (due < now_) {
    throw Error(ErrorCode::PastDue, "event due at " + std::to_string(due.ps()) + " ps is before now (" +
                                        std::to_string(now_.ps()) + " ps)");
  }
  const EventId id = next_seq_++;
  queue_.push(SimEvent{due, id, kind, payload});
  return id;
}

std::size_t Scheduler::run_until(SimTime limit, const Handler& handler) {
  std::size_t processed = 0;
  while (!queue_.empty() && queue_.top().due <= limit) {
    const SimEvent ev = queue_.top();
    queue_.pop();
    if (ev.due > now_) now_ = ev.due;
    if (tracing_) trace_.push_back(ev);
    ++processed;
    if (handler) handler(ev, *this);
  }
  return processed;
}

std::size_t Scheduler::run_all(const Handler& handler) {
  return run_until(SimTime::from_ps(std::numeric_limits<std::int64_t>::max()), handler);
}

std::optional<SimTime> Scheduler::next_due() const {
  if (queue_.empty()) return std::nullopt;
  return queue_.top().due;
}

}  // namespace hil

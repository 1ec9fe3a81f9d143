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

/**
 * @file sim_kernel.hpp
 * @brief Virtual-time event scheduler shared by every simulated component.
 *
 * The master timeline is an integer count of picoseconds. Components living in
 * different clock domains (sensor clock, link clock, DUT clock) convert their
 * absolute cycle counts with cycles_to_ps() on every event, so there is no
 * drift from summing per-cycle increments.
 *
 * Events are ordered by (due, seq) where seq is the insertion counter. Two runs
 * that schedule the same events in the same order process them identically.
 */

#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <queue>
#include <string_view>
#include <vector>

namespace hil {

/// A non-negative point (or span) on the virtual timeline, in picoseconds.
class SimTime {
 public:
  constexpr SimTime() = default;

  static SimTime from_ps(std::int64_t ps);
  static SimTime from_ns(std::int64_t ns) { return from_ps(ns * 1'000); }
  static SimTime from_us(std::int64_t us) { return from_ps(us * 1'000'000); }
  static SimTime from_ms(std::int64_t ms) { return from_ps(ms * 1'000'000'000); }
  /// Rounds half-up to the nearest picosecond.
  static SimTime from_seconds(double seconds);

  [[nodiscard]] constexpr std::int64_t ps() const noexcept { return ps_; }
  [[nodiscard]] double ms() const noexcept { return static_cast<double>(ps_) * 1e-9; }
  [[nodiscard]] double seconds() const noexcept { return static_cast<double>(ps_) * 1e-12; }

  constexpr auto operator<=>(const SimTime&) const = default;

  SimTime operator+(SimTime rhs) const;
  /// Throws InvalidArgument if the result would be negative.
  SimTime operator-(SimTime rhs) const;
  SimTime& operator+=(SimTime rhs);

 private:
  std::int64_t ps_ = 0;
};

/// round(cycles * 1e12 / clock_hz), half-up, with 128-bit intermediates.
/// Throws InvalidClock for clock_hz <= 0 and InvalidArgument for negative cycles.
SimTime cycles_to_ps(std::int64_t cycles, std::int64_t clock_hz);

/// Smallest cycle count whose start is at or after t in a clock domain.
std::int64_t ps_to_cycles_ceil(SimTime t, std::int64_t clock_hz);

enum class EventKind : std::uint8_t {
  CaptureRequest,
  ChunkArrival,
  ReadoutPixelWindow,
  ReadoutComplete,
  DeadlineCheck,
};

std::string_view to_string(EventKind kind);

struct EventPayload {
  std::uint64_t frame = 0;  ///< campaign-local capture ordinal
  std::uint64_t aux = 0;    ///< chunk index for ChunkArrival, unused otherwise
  friend bool operator==(const EventPayload&, const EventPayload&) = default;
};

using EventId = std::uint64_t;

struct SimEvent {
  SimTime due;
  EventId seq = 0;
  EventKind kind = EventKind::CaptureRequest;
  EventPayload payload;
  friend bool operator==(const SimEvent&, const SimEvent&) = default;
};

/// Single-threaded event queue plus the current virtual time.
class Scheduler {
 public:
  using Handler = std::function<void(const SimEvent&, Scheduler&)>;

  /// Enqueues an event; the scheduler assigns the sequence number, which is
  /// returned as the event id. Throws PastDue if due < now().
  EventId schedule(SimTime due, EventKind kind, EventPayload payload = {});

  /// Processes every event with due <= limit, including events the handler
  /// schedules along the way. Returns the number of processed events.
  std::size_t run_until(SimTime limit, const Handler& handler);

  /// Drains the queue completely.
  std::size_t run_all(const Handler& handler);

  [[nodiscard]] SimTime now() const noexcept { return now_; }
  [[nodiscard]] std::size_t pending() const noexcept { return queue_.size(); }
  [[nodiscard]] std::optional<SimTime> next_due() const;

  /// Records every processed event when enabled; used for replay checks.
  void enable_trace(bool on) { tracing_ = on; }
  [[nodiscard]] const std::vector<SimEvent>& trace() const noexcept { return trace_; }

 private:
  struct Later {
    bool operator()(const SimEvent& a, const SimEvent& b) const {
      if (a.due != b.due) return a.due > b.due;
      return a.seq > b.seq;
    }
  };

  std::priority_queue<SimEvent, std::vector<SimEvent>, Later> queue_;
  SimTime now_;
  EventId next_seq_ = 0;
  bool tracing_ = false;
  std::vector<SimEvent> trace_;
};

}  // namespace hil

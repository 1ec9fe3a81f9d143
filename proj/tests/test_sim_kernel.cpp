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

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <tuple>
#include <vector>

#include "hil/sim_kernel.hpp"
#include "test_support.hpp"

namespace hil {
namespace {

// Exact rational value of cycles * 1e12 / clock, reduced by the gcd first and
// then rounded half-up by comparing twice the remainder with the divisor.
std::int64_t rational_ps(std::int64_t cycles, std::int64_t clock) {
  std::int64_t num_factor = 1'000'000'000'000;
  std::int64_t den = clock;
  const std::int64_t g1 = std::gcd(num_factor, den);
  num_factor /= g1;
  den /= g1;
  const std::int64_t g2 = std::gcd(cycles, den);
  const std::int64_t c = cycles / g2;
  den /= g2;
  const std::int64_t q = c / den;
  const std::int64_t r = c % den;
  // value = (q + r/den) * num_factor
  const auto whole = static_cast<__int128>(q) * num_factor;
  const auto frac_num = static_cast<__int128>(r) * num_factor;
  auto frac_q = frac_num / den;
  const auto frac_r = frac_num % den;
  if (2 * frac_r >= den) ++frac_q;
  return static_cast<std::int64_t>(whole + frac_q);
}

TEST(CyclesToPs, SeventyFiveMegahertzFrameCycle) {
  EXPECT_EQ(cycles_to_ps(1'298'880, 75'000'000).ps(), 17'318'400'000);
  // roughly the 17 ms window the sensor leaves for fetching
  EXPECT_NEAR(cycles_to_ps(1'298'880, 75'000'000).ms(), 17.0, 0.5);
}

TEST(CyclesToPs, ZeroCyclesIsZero) {
  for (std::int64_t clock : {1, 5'000'000, 75'000'000}) EXPECT_EQ(cycles_to_ps(0, clock).ps(), 0);
}

TEST(CyclesToPs, FiveMegahertzMatchesRationalOracle) {
  EXPECT_EQ(cycles_to_ps(1'298'880, 5'000'000).ps(), rational_ps(1'298'880, 5'000'000));
  EXPECT_EQ(rational_ps(1'298'880, 5'000'000), 259'776'000'000);
}

TEST(CyclesToPs, RandomValuesMatchRationalOracle) {
  std::mt19937_64 rng(11);
  const std::int64_t clocks[] = {3, 7, 1'298'880, 5'000'000, 33'333'333, 40'000'000, 75'000'000};
  for (int i = 0; i < 5000; ++i) {
    const std::int64_t clock = clocks[i % std::size(clocks)];
    // keep the result on the int64 timeline (at most a million seconds)
    const auto span = std::min<std::uint64_t>(1ULL << 32, static_cast<std::uint64_t>(clock) * 1'000'000);
    const auto cycles = static_cast<std::int64_t>(rng() % span);
    ASSERT_EQ(cycles_to_ps(cycles, clock).ps(), rational_ps(cycles, clock)) << cycles << " @ " << clock;
  }
}

TEST(CyclesToPs, RejectsBadClock) {
  EXPECT_HIL_ERROR(cycles_to_ps(10, 0), ErrorCode::InvalidClock);
  EXPECT_HIL_ERROR(cycles_to_ps(10, -5), ErrorCode::InvalidClock);
}

TEST(CyclesToPs, AdditivityWithinOnePicosecond) {
  std::mt19937_64 rng(5);
  const std::int64_t clocks[] = {1, 3, 7, 5'000'000, 40'000'000, 75'000'000, 66'666'667};
  for (int i = 0; i < 20000; ++i) {
    const std::int64_t clock = clocks[i % std::size(clocks)];
    const auto span = std::min<std::uint64_t>(1ULL << 32, static_cast<std::uint64_t>(clock) * 1'000'000);
    const auto a = static_cast<std::int64_t>(rng() % span);
    const auto b = static_cast<std::int64_t>(rng() % span);
    const std::int64_t d = cycles_to_ps(a + b, clock).ps() - (cycles_to_ps(a, clock).ps() + cycles_to_ps(b, clock).ps());
    ASSERT_GE(d, -1);
    ASSERT_LE(d, 1);
  }
}

TEST(PsToCycles, CeilIsTheSmallestCoveringCycle) {
  for (std::int64_t clock : {3, 5'000'000, 75'000'000}) {
    for (std::int64_t ps : {0LL, 1LL, 199'999LL, 200'000LL, 13'333LL, 17'318'400'000LL}) {
      const std::int64_t k = ps_to_cycles_ceil(SimTime::from_ps(ps), clock);
      // k / clock >= ps / 1e12 and (k - 1) / clock < ps / 1e12
      EXPECT_GE(static_cast<__int128>(k) * 1'000'000'000'000, static_cast<__int128>(ps) * clock);
      if (k > 0) {
        EXPECT_LT(static_cast<__int128>(k - 1) * 1'000'000'000'000, static_cast<__int128>(ps) * clock);
      }
    }
  }
}

TEST(SimTime, ConversionsAndArithmetic) {
  EXPECT_EQ(SimTime::from_ms(3).ps(), 3'000'000'000);
  EXPECT_EQ(SimTime::from_us(2).ps(), 2'000'000);
  EXPECT_EQ(SimTime::from_seconds(2.5).ps(), 2'500'000'000'000);
  EXPECT_EQ((SimTime::from_ms(5) - SimTime::from_ms(2)).ps(), 3'000'000'000);
  EXPECT_HIL_ERROR(SimTime::from_ms(2) - SimTime::from_ms(5), ErrorCode::InvalidArgument);
  EXPECT_HIL_ERROR(SimTime::from_ps(-1), ErrorCode::InvalidArgument);
}

TEST(Scheduler, FirstEventOnEmptyQueue) {
  Scheduler s;
  s.schedule(SimTime{}, EventKind::CaptureRequest);
  EXPECT_EQ(s.pending(), 1U);
  ASSERT_TRUE(s.next_due().has_value());
  EXPECT_EQ(s.next_due()->ps(), 0);
}

TEST(Scheduler, EqualDueTimesRunInInsertionOrder) {
  Scheduler s;
  const auto first = s.schedule(SimTime::from_ms(1), EventKind::ChunkArrival, {1, 0});
  const auto second = s.schedule(SimTime::from_ms(1), EventKind::ChunkArrival, {2, 0});
  std::vector<EventId> seen;
  s.run_all([&](const SimEvent& e, Scheduler&) { seen.push_back(e.seq); });
  EXPECT_EQ(seen, (std::vector<EventId>{first, second}));
}

TEST(Scheduler, OrderMatchesSortByDueThenSeq) {
  Scheduler s;
  for (std::int64_t t : {5, 3, 4}) s.schedule(SimTime::from_ps(t), EventKind::DeadlineCheck);
  std::vector<std::int64_t> seen;
  s.run_all([&](const SimEvent& e, Scheduler&) { seen.push_back(e.due.ps()); });
  EXPECT_EQ(seen, (std::vector<std::int64_t>{3, 4, 5}));

  std::mt19937_64 rng(3);
  Scheduler big;
  std::vector<std::pair<std::int64_t, EventId>> expected;
  for (int i = 0; i < 2000; ++i) {
    const auto due = static_cast<std::int64_t>(rng() % 50);
    expected.emplace_back(due, big.schedule(SimTime::from_ps(due), EventKind::ChunkArrival));
  }
  std::sort(expected.begin(), expected.end());
  std::vector<std::pair<std::int64_t, EventId>> got;
  big.run_all([&](const SimEvent& e, Scheduler&) { got.emplace_back(e.due.ps(), e.seq); });
  EXPECT_EQ(got, expected);
}

TEST(Scheduler, RunUntilOnEmptyQueue) {
  Scheduler s;
  EXPECT_EQ(s.run_until(SimTime::from_ms(10), [](const SimEvent&, Scheduler&) {}), 0U);
}

TEST(Scheduler, RunUntilStopsAtLimit) {
  Scheduler s;
  const std::int64_t dues[] = {1, 9, 4, 12, 10, 30};
  const std::int64_t limit = 10;
  for (auto d : dues) s.schedule(SimTime::from_ps(d), EventKind::ReadoutComplete);
  const auto want = static_cast<std::size_t>(std::count_if(std::begin(dues), std::end(dues), [&](auto d) { return d <= limit; }));
  EXPECT_EQ(s.run_until(SimTime::from_ps(limit), [](const SimEvent&, Scheduler&) {}), want);
  EXPECT_EQ(s.pending(), std::size(dues) - want);
  EXPECT_EQ(s.now().ps(), 10);
}

TEST(Scheduler, NowNeverMovesBackwards) {
  Scheduler s;
  s.schedule(SimTime::from_ps(5), EventKind::ReadoutComplete);
  s.run_until(SimTime::from_ps(100), [](const SimEvent&, Scheduler&) {});
  EXPECT_EQ(s.now().ps(), 5);
  s.run_until(SimTime::from_ps(2), [](const SimEvent&, Scheduler&) {});
  EXPECT_EQ(s.now().ps(), 5);
  EXPECT_HIL_ERROR(s.schedule(SimTime::from_ps(4), EventKind::ReadoutComplete), ErrorCode::PastDue);
}

// Handlers spawn follow-ups; a naive oracle replays the same rules by
// repeatedly picking the minimum (due, seq) from a flat list.
TEST(Scheduler, SpawnedEventsMatchFixpointReplay) {
  const std::int64_t limit = 40;
  auto rule = [](std::int64_t due, std::uint64_t gen) -> std::vector<std::int64_t> {
    if (gen >= 3) return {};
    return {due + static_cast<std::int64_t>(gen) * 3 + 1, due + 7};
  };

  Scheduler s;
  s.enable_trace(true);
  for (std::int64_t d : {2, 0, 5}) s.schedule(SimTime::from_ps(d), EventKind::ChunkArrival, {0, 0});
  const auto processed = s.run_until(SimTime::from_ps(limit), [&](const SimEvent& e, Scheduler& q) {
    for (auto nd : rule(e.due.ps(), e.payload.frame)) q.schedule(SimTime::from_ps(nd), EventKind::ChunkArrival, {e.payload.frame + 1, 0});
  });

  struct Item {
    std::int64_t due;
    std::uint64_t seq;
    std::uint64_t gen;
  };
  std::vector<Item> pending;
  std::uint64_t seq = 0;
  for (std::int64_t d : {2, 0, 5}) pending.push_back({d, seq++, 0});
  std::vector<std::pair<std::int64_t, std::uint64_t>> order;
  while (true) {
    auto it = std::min_element(pending.begin(), pending.end(), [](const Item& a, const Item& b) {
      return std::tie(a.due, a.seq) < std::tie(b.due, b.seq);
    });
    if (it == pending.end() || it->due > limit) break;
    const Item cur = *it;
    pending.erase(it);
    order.emplace_back(cur.due, cur.seq);
    for (auto nd : rule(cur.due, cur.gen)) pending.push_back({nd, seq++, cur.gen + 1});
  }

  ASSERT_EQ(processed, order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    EXPECT_EQ(s.trace()[i].due.ps(), order[i].first);
    EXPECT_EQ(s.trace()[i].seq, order[i].second);
  }
  EXPECT_EQ(s.pending(), pending.size());
}

TEST(Scheduler, IdenticalInputsGiveIdenticalTraces) {
  auto run = [] {
    Scheduler s;
    s.enable_trace(true);
    std::mt19937_64 rng(99);
    for (int i = 0; i < 300; ++i) s.schedule(SimTime::from_ps(static_cast<std::int64_t>(rng() % 1000)), EventKind::DeadlineCheck, {static_cast<std::uint64_t>(i), 0});
    s.run_all([](const SimEvent& e, Scheduler& q) {
      if (e.payload.frame % 7 == 0 && e.payload.aux == 0) q.schedule(e.due + SimTime::from_ps(3), EventKind::ReadoutComplete, {e.payload.frame, 1});
    });
    return s.trace();
  };
  EXPECT_EQ(run(), run());
}

TEST(EventKind, Names) {
  EXPECT_EQ(to_string(EventKind::CaptureRequest), "capture-request");
  EXPECT_EQ(to_string(EventKind::DeadlineCheck), "deadline-check");
}

}  // namespace
}  // namespace hil

// Copyright 2026 The Avatar Cache Simulator Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <cmath>

#include "avatar/mode_controller.hpp"
#include "avatar/rng.hpp"

namespace avatar {
namespace {

constexpr uint64_t kEntries = 262144;
constexpr uint64_t kTon = 4'000'000'000;

AccessRequest rd(Sdid sdid, uint64_t line) {
  return {sdid, Op::Read, LineAddress(line).physical()};
}

// Flush cost written out by hand: one scan cycle per 16 entries, rounded up,
// plus 16 cycles per written line.
uint64_t expected_flush(uint64_t entries, uint64_t written) {
  return (entries + 15) / 16 + written * 16;
}

TEST(FlushModel, FixedWritesBackEverything) {
  const FlushReport r = FlushModel{}.compute(FlushStrategy::Fixed, kEntries, 0);
  EXPECT_EQ(r.cycles, expected_flush(kEntries, kEntries));
  EXPECT_EQ(r.cycles, 4210688u);
  // Reference estimate about 4.33 million cycles; within 10%.
  EXPECT_NEAR(double(r.cycles), 4.33e6, 0.1 * 4.33e6);
}

TEST(FlushModel, StallWithTypicalDirtyFraction) {
  const auto dirty = static_cast<uint64_t>(std::llround(0.29 * kEntries));
  const FlushReport r =
      FlushModel{}.compute(FlushStrategy::Stall, kEntries, dirty);
  EXPECT_EQ(r.cycles, expected_flush(kEntries, dirty));
  EXPECT_EQ(r.cycles, 1232736u);
  // Reference average about 1.25 million cycles; within 10%.
  EXPECT_NEAR(double(r.cycles), 1.25e6, 0.1 * 1.25e6);
  EXPECT_NEAR(r.dirty_fraction(), 0.29, 1e-5);
}

TEST(FlushModel, BypassCostsTheSameAsStall) {
  const FlushModel m;
  EXPECT_EQ(m.compute(FlushStrategy::Bypass, kEntries, 1000).cycles,
            m.compute(FlushStrategy::Stall, kEntries, 1000).cycles);
}

TEST(FlushModel, FixedIgnoresDirtyState) {
  const FlushModel m;
  Rng rng(1);
  const uint64_t base = m.compute(FlushStrategy::Fixed, kEntries, 0).cycles;
  for (int i = 0; i < 100; ++i) {
    ASSERT_EQ(m.compute(FlushStrategy::Fixed, kEntries, rng.below(kEntries + 1))
                  .cycles,
              base);
  }
}

TEST(FlushModel, PortsAndWritebackCostAreParameters) {
  const FlushModel m{8, 4};
  EXPECT_EQ(m.compute(FlushStrategy::Stall, 100, 10).cycles, 13u + 40u);
  EXPECT_THROW((FlushModel{0, 16}.compute(FlushStrategy::Stall, 1, 0)),
               ConfigError);
}

ModeController make(OperatingMode m = OperatingMode::AvatarN,
                    uint64_t seed = 1) {
  return ModeController(m, ControllerConfig{}, EngineOptions{}, seed);
}

TEST(Controller, FirstSwitchAfterBootIsEligible) {
  ModeController c = make();
  const SwitchDecision d =
      c.request_switch(OperatingMode::AvatarR, FlushStrategy::Stall, 0);
  EXPECT_TRUE(d.accepted);
  EXPECT_EQ(c.mode(), OperatingMode::AvatarR);
  EXPECT_EQ(c.cache().geometry(),
            CacheGeometry::defaults(OperatingMode::AvatarR));
}

TEST(Controller, CooldownBoundaryIsInclusive) {
  ModeController c = make();
  ASSERT_TRUE(
      c.request_switch(OperatingMode::AvatarR, FlushStrategy::Stall, 100)
          .accepted);
  const SwitchDecision early = c.request_switch(
      OperatingMode::AvatarP, FlushStrategy::Stall, 100 + kTon - 1);
  EXPECT_FALSE(early.accepted);
  EXPECT_EQ(early.remaining_cooldown, 1u);
  EXPECT_EQ(c.mode(), OperatingMode::AvatarR);
  EXPECT_TRUE(
      c.request_switch(OperatingMode::AvatarP, FlushStrategy::Stall, 100 + kTon)
          .accepted);
  EXPECT_EQ(c.mode(), OperatingMode::AvatarP);
}

TEST(Controller, BurstInsideOneWindowAcceptsOnce) {
  ModeController c = make();
  uint64_t accepted = 0;
  for (int i = 0; i < 100; ++i) {
    const OperatingMode t =
        i % 2 ? OperatingMode::AvatarN : OperatingMode::AvatarR;
    accepted += c.request_switch(t, FlushStrategy::Stall, i * 1000).accepted;
  }
  EXPECT_EQ(accepted, 1u);
  EXPECT_EQ(c.switch_log().size(), 100u);
  EXPECT_EQ(c.accepted_switches(), 1u);
}

TEST(Controller, RejectedSwitchLeavesCacheUntouched) {
  ModeController c = make();
  c.request_switch(OperatingMode::AvatarN, FlushStrategy::Stall, 0);
  c.advance_to(1'000'000);
  for (uint64_t l = 0; l < 100; ++l) c.access(rd(0, l));
  const SwitchDecision d =
      c.request_switch(OperatingMode::AvatarR, FlushStrategy::Stall, 2'000'000);
  EXPECT_FALSE(d.accepted);
  EXPECT_FALSE(d.flush);
  EXPECT_EQ(c.cache().valid_count(), 100u);
}

TEST(Controller, StallRejectsUntilStable) {
  ModeController c = make();
  for (uint64_t l = 0; l < 5000; ++l) {
    c.access({0, Op::Write, LineAddress(l).physical()});
  }
  const SwitchDecision d =
      c.request_switch(OperatingMode::AvatarR, FlushStrategy::Stall, 10);
  ASSERT_TRUE(d.accepted);
  EXPECT_EQ(d.flush->dirty_lines, 5000u);
  EXPECT_EQ(d.stable_at, 10 + expected_flush(kEntries, 5000));
  EXPECT_FALSE(c.poll_stable());
  EXPECT_EQ(c.access(rd(0, 1)).outcome, Outcome::RejectedUnstable);
  c.advance_to(d.stable_at - 1);
  EXPECT_EQ(c.access(rd(0, 1)).outcome, Outcome::RejectedUnstable);
  c.advance_to(d.stable_at);
  EXPECT_TRUE(c.poll_stable());
  EXPECT_EQ(c.access(rd(0, 1)).outcome, Outcome::MissInstalled);
  EXPECT_EQ(c.cache().stats().domains[0].rejected, 2u);
}

TEST(Controller, BypassServesMissesWithoutFilling) {
  ModeController c = make();
  c.request_switch(OperatingMode::AvatarR, FlushStrategy::Bypass, 0);
  ASSERT_FALSE(c.poll_stable());
  const AccessResult r = c.access(rd(2, 1));
  EXPECT_EQ(r.outcome, Outcome::MissBypassed);
  EXPECT_EQ(r.latency_cycles, 200u);
  EXPECT_EQ(c.cache().valid_count(), 0u);
  const auto& d = c.cache().stats().domains[2];
  EXPECT_EQ(d.bypassed, 1u);
  EXPECT_EQ(d.misses, 1u);
  EXPECT_EQ(d.accesses, 1u);
}

TEST(Controller, FixedRejectsLikeStall) {
  ModeController c = make();
  const SwitchDecision d =
      c.request_switch(OperatingMode::AvatarP, FlushStrategy::Fixed, 0);
  EXPECT_EQ(d.flush->cycles, 4210688u);
  EXPECT_EQ(c.access(rd(0, 1)).outcome, Outcome::RejectedUnstable);
}

TEST(Controller, SwitchInvalidatesAndRekeys) {
  ModeController c = make(OperatingMode::AvatarR, 3);
  std::vector<SetRef> before;
  for (uint64_t l = 0; l < 256; ++l) {
    c.access(rd(0, l));
    before.push_back(c.cache().candidate_sets(LineAddress(l))[0]);
  }
  ASSERT_TRUE(c.request_switch(OperatingMode::AvatarN, FlushStrategy::Stall, 0)
                  .accepted);
  EXPECT_EQ(c.cache().valid_count(), 0u);
  c.advance_to(kTon);
  ASSERT_TRUE(
      c.request_switch(OperatingMode::AvatarR, FlushStrategy::Stall, kTon)
          .accepted);
  int same = 0;
  for (uint64_t l = 0; l < 256; ++l) {
    same += c.cache().candidate_sets(LineAddress(l))[0] == before[l];
  }
  EXPECT_LT(same, 8);
}

TEST(Controller, SwitchToSameModeStillFlushes) {
  ModeController c = make();
  c.access(rd(0, 1));
  const SwitchDecision d =
      c.request_switch(OperatingMode::AvatarN, FlushStrategy::Stall, 0);
  EXPECT_TRUE(d.accepted);
  EXPECT_EQ(c.cache().valid_count(), 0u);
}

TEST(Controller, TimeNeverMovesBackwards) {
  ModeController c = make();
  c.advance_to(500);
  c.advance_to(100);
  EXPECT_EQ(c.now(), 500u);
}

TEST(ModeBits, ControlRegisterEncoding) {
  EXPECT_EQ(msr_bits(OperatingMode::AvatarN), 0b00);
  EXPECT_EQ(msr_bits(OperatingMode::AvatarR), 0b01);
  EXPECT_EQ(msr_bits(OperatingMode::AvatarP), 0b11);
  EXPECT_EQ(mode_from_msr(0b01), OperatingMode::AvatarR);
  EXPECT_THROW(mode_from_msr(0b10), ConfigError);
  EXPECT_EQ(parse_mode("avatar-p"), OperatingMode::AvatarP);
  EXPECT_EQ(parse_mode("R"), OperatingMode::AvatarR);
  EXPECT_THROW(parse_mode("avatar-x"), ConfigError);
  EXPECT_EQ(parse_flush_strategy("fixed"), FlushStrategy::Fixed);
  EXPECT_THROW(parse_flush_strategy("later"), ConfigError);
}

}  // namespace
}  // namespace avatar

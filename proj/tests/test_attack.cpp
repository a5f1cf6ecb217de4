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

#include "avatar/attack.hpp"

namespace avatar {
namespace {

const LineAddress kTarget(0x123456);

TEST(EvictionSet, FoundOnTheBaselineCache) {
  ModeController sys(OperatingMode::AvatarN, {}, {}, 3);
  AttackBudget budget;
  budget.max_accesses = 20'000'000;
  budget.rng_seed = 4;
  AttackerPort attacker(sys, 0, budget);
  VictimPort victim(sys, 1);
  const auto r = find_eviction_set(attacker, victim, kTarget);
  ASSERT_TRUE(r.set) << r.stop_reason;
  EXPECT_EQ(r.stop_reason, "found");
  EXPECT_EQ(r.set->size(), 16u);

  const auto target_set = sys.cache().candidate_sets(kTarget)[0];
  for (LineAddress l : *r.set) {
    EXPECT_EQ(sys.cache().candidate_sets(l)[0], target_set);
  }
  for (int i = 0; i < 100; ++i) {
    EXPECT_GE(replay_eviction_set(attacker, victim, *r.set, kTarget), 1u)
        << "replay " << i;
  }
  const auto rep = eviction_set_report(r, OperatingMode::AvatarN);
  EXPECT_TRUE(rep.success);
  EXPECT_EQ(rep.statistic, 16.0);
}

TEST(EvictionSet, NotFoundUnderRandomization) {
  ModeController sys(OperatingMode::AvatarR, {}, {}, 3);
  AttackBudget budget;
  budget.max_accesses = 100'000'000;
  const auto r = find_eviction_set(sys, kTarget, 0, 1, budget);
  EXPECT_FALSE(r.set);
  EXPECT_NE(r.stop_reason, "found");
  EXPECT_LE(r.accesses_used, budget.max_accesses);
  EXPECT_FALSE(eviction_set_report(r, OperatingMode::AvatarR).success);
}

TEST(EvictionSet, NotFoundAcrossPartitions) {
  ModeController sys(OperatingMode::AvatarP, {}, two_domain_options(0, 1), 3);
  AttackBudget budget;
  budget.max_accesses = 3'000'000;
  const auto r = find_eviction_set(sys, kTarget, 0, 1, budget);
  EXPECT_FALSE(r.set);
}

TEST(EvictionSet, PartitionedAttackerCannotSeeTheVictim) {
  // Same seed, same attacker requests; only the victim differs.
  auto trace = [](bool victim_active) {
    ModeController sys(OperatingMode::AvatarP, {}, two_domain_options(0, 1),
                       8);
    AttackBudget budget;
    AttackerPort attacker(sys, 0, budget);
    VictimPort victim(sys, 1);
    Rng rng(2);
    std::vector<uint32_t> lat;
    for (int round = 0; round < 20; ++round) {
      for (uint64_t l = 0; l < 3000; ++l) {
        lat.push_back(attacker.touch(LineAddress(l * 1024 + round % 3)));
      }
      if (victim_active) {
        for (int k = 0; k < 5000; ++k) {
          victim.touch(LineAddress(rng.below(uint64_t{1} << 24)));
        }
      }
    }
    return lat;
  };
  EXPECT_EQ(trace(true), trace(false));
}

TEST(Occupancy, Pearson) {
  const std::vector<double> x{1, 2, 3, 4};
  const std::vector<double> y{2, 4, 6, 8};
  const std::vector<double> z{8, 6, 4, 2};
  const std::vector<double> c{5, 5, 5, 5};
  EXPECT_NEAR(pearson(x, y), 1.0, 1e-12);
  EXPECT_NEAR(pearson(x, z), -1.0, 1e-12);
  EXPECT_EQ(pearson(x, c), 0.0);
}

ChannelReport occupancy(OperatingMode mode, uint32_t trials) {
  OccupancyProbeParams p;
  p.mode = mode;
  p.trials = trials;
  if (mode == OperatingMode::AvatarP) p.engine = two_domain_options(0, 1);
  AttackBudget budget;
  budget.max_accesses = 1'000'000'000;
  return occupancy_probe(p, budget);
}

TEST(Occupancy, LeaksOnSharedCaches) {
  for (auto mode : {OperatingMode::AvatarN, OperatingMode::AvatarR}) {
    const auto r = occupancy(mode, 3);
    EXPECT_TRUE(r.success) << to_string(mode);
    EXPECT_GT(r.statistic, 0.5) << to_string(mode);
  }
}

TEST(Occupancy, SilentUnderPartitioning) {
  const auto r = occupancy(OperatingMode::AvatarP, 3);
  EXPECT_FALSE(r.success);
  EXPECT_LT(std::abs(r.statistic), 0.1);
}

TEST(SwitchDos, BurstGetsOneSwitch) {
  ControllerConfig cfg;
  cfg.geometries.n = CacheGeometry::make(OperatingMode::AvatarN, 64, 4, 1, 0);
  cfg.geometries.r = CacheGeometry::make(OperatingMode::AvatarR, 32, 8, 2, 1);
  cfg.geometries.p = CacheGeometry::make(OperatingMode::AvatarP, 16, 32, 1, 0);
  ModeController sys(OperatingMode::AvatarN, cfg,
                     two_domain_options(0, 1, 32), 1);
  const auto r = switch_dos_probe(sys, 100, 0);
  EXPECT_FALSE(r.success);
  EXPECT_EQ(r.statistic, 1.0);
  EXPECT_EQ(sys.accepted_switches(), 1u);
}

TEST(SwitchDos, SpacedRequestsStayWithinTheBound) {
  ControllerConfig cfg;
  cfg.t_on_min = 1000;
  cfg.geometries.n = CacheGeometry::make(OperatingMode::AvatarN, 64, 4, 1, 0);
  cfg.geometries.r = CacheGeometry::make(OperatingMode::AvatarR, 32, 8, 2, 1);
  cfg.geometries.p = CacheGeometry::make(OperatingMode::AvatarP, 16, 32, 1, 0);
  ModeController sys(OperatingMode::AvatarN, cfg,
                     two_domain_options(0, 1, 32), 1);
  const auto r = switch_dos_probe(sys, 50, 300);
  EXPECT_FALSE(r.success);
  // 49 * 300 cycles elapsed: switches at 0, 1200, 2400, ... 14400.
  EXPECT_EQ(r.statistic, 13.0);
  EXPECT_LE(r.statistic, r.details["allowed"].get<double>());
}

TEST(SwitchDos, LegitimateCadenceIsNotAnAttack) {
  ControllerConfig cfg;
  cfg.t_on_min = 1000;
  cfg.geometries.n = CacheGeometry::make(OperatingMode::AvatarN, 64, 4, 1, 0);
  cfg.geometries.r = CacheGeometry::make(OperatingMode::AvatarR, 32, 8, 2, 1);
  cfg.geometries.p = CacheGeometry::make(OperatingMode::AvatarP, 16, 32, 1, 0);
  ModeController sys(OperatingMode::AvatarN, cfg,
                     two_domain_options(0, 1, 32), 1);
  const auto r = switch_dos_probe(sys, 20, 1000);
  EXPECT_EQ(r.statistic, 20.0);
  EXPECT_FALSE(r.success);
}

TEST(FlushTiming, FixedHidesTheDirtyFraction) {
  const auto fixed = flush_timing_probe(FlushStrategy::Fixed, 4, {}, 5);
  EXPECT_FALSE(fixed.success);
  EXPECT_EQ(fixed.statistic, 0.0);
  const auto stall = flush_timing_probe(FlushStrategy::Stall, 4, {}, 5);
  EXPECT_TRUE(stall.success);
  EXPECT_GT(stall.statistic, 0.0);
}

TEST(Budget, ExhaustionThrows) {
  ModeController sys(OperatingMode::AvatarN, {}, {}, 1);
  AttackBudget budget;
  budget.max_accesses = 3;
  AttackerPort a(sys, 0, budget);
  a.touch(LineAddress(1));
  a.touch(LineAddress(2));
  a.touch(LineAddress(3));
  EXPECT_THROW(a.touch(LineAddress(4)), BudgetExhausted);
  EXPECT_EQ(a.accesses_used(), 3u);
  EXPECT_THROW(a.flush(LineAddress(1)), BudgetExhausted);
}

TEST(Budget, HitThresholdSplitsHitsFromMisses) {
  ModeController sys(OperatingMode::AvatarR, {}, {}, 1);
  AttackerPort a(sys, 0, AttackBudget{});
  EXPECT_FALSE(a.hit(LineAddress(77)));
  EXPECT_TRUE(a.hit(LineAddress(77)));
}

}  // namespace
}  // namespace avatar

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

#include <array>

#include "avatar/cache_core.hpp"
#include "avatar/rng.hpp"

namespace avatar {
namespace {

TEST(TagEntry, FieldsRoundTrip) {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const uint64_t tag = rng.below(uint64_t{1} << 40);
    const auto sdid = static_cast<Sdid>(rng.below(256));
    const auto coh = static_cast<Coherence>(rng.below(5));
    const auto rrip = static_cast<uint8_t>(rng.below(8));
    const TagEntry e = TagEntry::make(tag, sdid, coh, rrip);
    ASSERT_TRUE(e.valid());
    ASSERT_EQ(e.tag(), tag);
    ASSERT_EQ(e.sdid(), sdid);
    ASSERT_EQ(e.coherence(), coh);
    ASSERT_EQ(e.rrip(), rrip);
    ASSERT_EQ(e.dirty(), coh == Coherence::M || coh == Coherence::O);
  }
}

TEST(TagEntry, InvalidationClearsEveryBit) {
  TagEntry e = TagEntry::make(0xffffffffffULL, 15, Coherence::M, 7);
  e.invalidate();
  EXPECT_EQ(e.raw(), 0u);
  EXPECT_FALSE(e.valid());
  EXPECT_FALSE(e.dirty());
}

TEST(TagEntry, StateUpdatesLeaveOtherFieldsAlone) {
  TagEntry e = TagEntry::make(0x123, 3, Coherence::E, 6);
  e.set_coherence(Coherence::M);
  e.set_rrip(0);
  EXPECT_EQ(e.tag(), 0x123u);
  EXPECT_EQ(e.sdid(), 3);
  EXPECT_EQ(e.coherence(), Coherence::M);
  EXPECT_EQ(e.rrip(), 0);
}

TEST(HardwareLayout, FitsTheFortyBitEntry) {
  const auto n = hardware_layout(OperatingMode::AvatarN);
  EXPECT_EQ(n.tag_bits, 26u);
  EXPECT_EQ(n.sdid_bits, 0u);
  EXPECT_EQ(n.used_bits(), 32u);
  for (auto m : {OperatingMode::AvatarR, OperatingMode::AvatarP}) {
    const auto l = hardware_layout(m);
    EXPECT_EQ(l.tag_bits, 30u);
    EXPECT_EQ(l.coherence_bits, 3u);
    EXPECT_EQ(l.rrip_bits, 3u);
    EXPECT_EQ(l.sdid_bits, 4u);
    EXPECT_EQ(l.used_bits(), HardwareTagLayout::kEntryBits);
  }
}

TEST(HardwareLayout, PackedWordNeverExceedsFortyBits) {
  Rng rng(2);
  for (auto m : {OperatingMode::AvatarN, OperatingMode::AvatarR,
                 OperatingMode::AvatarP}) {
    const auto l = hardware_layout(m);
    for (int i = 0; i < 1000; ++i) {
      const TagEntry e = TagEntry::make(rng.below(uint64_t{1} << l.tag_bits),
                                        static_cast<Sdid>(rng.below(16)),
                                        Coherence::M, rng.below(8));
      ASSERT_LT(pack_hardware_entry(e, m), uint64_t{1} << l.used_bits());
    }
  }
}

TEST(Match, FindsQualifiedEntries) {
  std::array<TagEntry, 4> set{};
  set[1] = TagEntry::make(77, 2, Coherence::E);
  set[3] = TagEntry::make(77, 5, Coherence::E);
  EXPECT_EQ(match(set, 77, 2, true), 1u);
  EXPECT_EQ(match(set, 77, 5, true), 3u);
  EXPECT_EQ(match(set, 77, 9, true), std::nullopt);
  EXPECT_EQ(match(set, 78, 2, true), std::nullopt);
}

TEST(Match, DuplicateIsAnInvariantViolation) {
  std::array<TagEntry, 4> set{};
  set[0] = TagEntry::make(77, 2, Coherence::E);
  set[2] = TagEntry::make(77, 5, Coherence::E);
  EXPECT_THROW(match(set, 77, 0, false), InvariantViolation);
}

TEST(Match, IgnoresInvalidSlots) {
  std::array<TagEntry, 2> set{};
  EXPECT_EQ(match(set, 0, 0, true), std::nullopt);
}

TEST(Srrip, PrefersLowestInvalidWay) {
  std::array<TagEntry, 4> set{};
  set[0] = TagEntry::make(1, 0, Coherence::E, 7);
  EXPECT_EQ(srrip_select_victim(set), 1u);
  EXPECT_EQ(set[0].rrip(), 7);
}

TEST(Srrip, AgesUntilADistantEntryAppears) {
  std::array<TagEntry, 4> set{};
  const std::array<uint8_t, 4> rrip{0, 5, 3, 5};
  for (int w = 0; w < 4; ++w) set[w] = TagEntry::make(w, 0, Coherence::E, rrip[w]);
  EXPECT_EQ(srrip_select_victim(set), 1u);
  EXPECT_EQ(set[0].rrip(), 2);
  EXPECT_EQ(set[1].rrip(), 7);
  EXPECT_EQ(set[2].rrip(), 5);
  EXPECT_EQ(set[3].rrip(), 7);
}

TEST(Srrip, FillAndHitPositions) {
  const TagEntry e = TagEntry::make(1, 0, Coherence::E, 3);
  EXPECT_EQ(rrip_on_fill(e).rrip(), kRripFill);
  EXPECT_EQ(rrip_on_hit(e).rrip(), kRripHit);
  EXPECT_EQ(kRripFill, 6);
  EXPECT_EQ(kRripMax, 7);
}

TEST(Srrip, NeverLooksOutsideItsSpan) {
  std::array<TagEntry, 8> set{};
  for (int w = 0; w < 8; ++w) set[w] = TagEntry::make(w, 0, Coherence::E, 6);
  set[1] = TagEntry{};  // invalid, but outside the span below
  const uint32_t v = srrip_select_victim(std::span(set).subspan(4, 4));
  EXPECT_EQ(v, 0u);
  for (int w = 0; w < 4; ++w) EXPECT_EQ(set[w].rrip(), w == 1 ? 0 : 6);
}

TEST(TagStore, CountersTrackFillsAndInvalidations) {
  TagStore s(2, 8, 4);
  Rng rng(9);
  std::vector<EntryLocation> filled;
  for (int i = 0; i < 40; ++i) {
    const EntryLocation loc{static_cast<uint32_t>(rng.below(2)),
                            static_cast<uint32_t>(rng.below(8)),
                            static_cast<uint32_t>(rng.below(4))};
    if (s.at(loc).valid()) continue;
    s.fill(loc, TagEntry::make(i, 0, i % 3 ? Coherence::E : Coherence::M));
    filled.push_back(loc);
  }
  EXPECT_EQ(s.valid_count(), filled.size());
  EXPECT_EQ(s.recount_valid(), filled.size());
  for (size_t i = 0; i < filled.size(); i += 2) s.invalidate(filled[i]);
  EXPECT_EQ(s.valid_count(), s.recount_valid());
  for (uint32_t k = 0; k < 2; ++k)
    for (uint32_t i = 0; i < 8; ++i)
      EXPECT_EQ(s.valid_in_set(k, i), s.rescan_set(k, i));
  EXPECT_THROW(s.fill(filled[1], TagEntry::make(1, 0, Coherence::E)),
               InvariantViolation);
  EXPECT_THROW(s.invalidate(filled[0]), InvariantViolation);
  s.clear();
  EXPECT_EQ(s.valid_count(), 0u);
  EXPECT_EQ(s.recount_valid(), 0u);
}

TEST(TagStore, FlatIndexRoundTrip) {
  TagStore s(2, 16, 8);
  for (uint64_t f = 0; f < s.size(); ++f) {
    ASSERT_EQ(s.flat_index(s.location(f)), f);
  }
}

}  // namespace
}  // namespace avatar

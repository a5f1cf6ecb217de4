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

#ifndef AVATAR_CACHE_CORE_HPP_
#define AVATAR_CACHE_CORE_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "avatar/geometry.hpp"
#include "avatar/types.hpp"

namespace avatar {

// MOESI role. Only dirty (M/O) vs clean (E/S) vs invalid drives behavior.
enum class Coherence : uint8_t { I = 0, S = 1, E = 2, O = 3, M = 4 };

inline constexpr bool is_dirty(Coherence c) {
  return c == Coherence::M || c == Coherence::O;
}

inline constexpr uint8_t kRripMax = 7;
inline constexpr uint8_t kRripFill = 6;
inline constexpr uint8_t kRripHit = 0;

// One tag-store slot packed into a 64-bit word:
//   [0,40) tag  [40,48) sdid  [48] valid  [49,52) coherence  [52,55) rrip
// An invalid slot is all zeroes, so nothing from a previous owner survives
// invalidation.
class TagEntry {
 public:
  static constexpr int kTagBits = 40;
  static constexpr uint64_t kTagMask = (uint64_t{1} << kTagBits) - 1;
  static constexpr int kSdidShift = 40;
  static constexpr uint64_t kSdidMask = uint64_t{0xff} << kSdidShift;
  static constexpr uint64_t kValidBit = uint64_t{1} << 48;
  static constexpr int kCoherenceShift = 49;
  static constexpr int kRripShift = 52;

  constexpr TagEntry() = default;

  static constexpr TagEntry make(uint64_t tag, Sdid sdid, Coherence state,
                                 uint8_t rrip = 0) {
    TagEntry e;
    e.word_ = (tag & kTagMask) | (uint64_t{static_cast<uint8_t>(sdid)} << kSdidShift) |
              kValidBit |
              (uint64_t{static_cast<uint8_t>(state)} << kCoherenceShift) |
              (uint64_t{rrip} << kRripShift);
    return e;
  }

  constexpr bool valid() const { return (word_ & kValidBit) != 0; }
  constexpr uint64_t tag() const { return word_ & kTagMask; }
  constexpr Sdid sdid() const {
    return static_cast<Sdid>((word_ & kSdidMask) >> kSdidShift);
  }
  constexpr Coherence coherence() const {
    return static_cast<Coherence>((word_ >> kCoherenceShift) & 0x7);
  }
  constexpr uint8_t rrip() const {
    return static_cast<uint8_t>((word_ >> kRripShift) & 0x7);
  }
  constexpr bool dirty() const { return valid() && is_dirty(coherence()); }
  constexpr uint64_t raw() const { return word_; }

  void set_coherence(Coherence c) {
    word_ = (word_ & ~(uint64_t{0x7} << kCoherenceShift)) |
            (uint64_t{static_cast<uint8_t>(c)} << kCoherenceShift);
  }
  void set_rrip(uint8_t rrip) {
    word_ = (word_ & ~(uint64_t{0x7} << kRripShift)) |
            (uint64_t{rrip & 0x7u} << kRripShift);
  }
  void invalidate() { word_ = 0; }

  friend constexpr bool operator==(TagEntry, TagEntry) = default;

 private:
  uint64_t word_ = 0;
};

// Field widths of the 40-bit hardware tag entry in each mode.
struct HardwareTagLayout {
  uint32_t tag_bits;
  uint32_t coherence_bits;
  uint32_t rrip_bits;
  uint32_t sdid_bits;
  uint32_t used_bits() const {
    return tag_bits + coherence_bits + rrip_bits + sdid_bits;
  }
  static constexpr uint32_t kEntryBits = 40;
};

HardwareTagLayout hardware_layout(OperatingMode mode);

// Packs an entry into the hardware word, most significant field first:
// tag | coherence | rrip | sdid. Unused high bits are zero.
uint64_t pack_hardware_entry(const TagEntry& entry, OperatingMode mode);

struct EntryLocation {
  uint32_t skew = 0;
  uint32_t set = 0;
  uint32_t way = 0;

  friend bool operator==(const EntryLocation&, const EntryLocation&) = default;
};

// Flat [skew][set][way] storage with per-set and per-skew valid counts.
class TagStore {
 public:
  TagStore() = default;
  TagStore(uint32_t skews, uint32_t sets, uint32_t ways);

  uint32_t skews() const { return skews_; }
  uint32_t sets() const { return sets_; }
  uint32_t ways() const { return ways_; }
  uint64_t size() const { return entries_.size(); }

  std::span<TagEntry> set(uint32_t skew, uint32_t index) {
    return {entries_.data() + base(skew, index), ways_};
  }
  std::span<const TagEntry> set(uint32_t skew, uint32_t index) const {
    return {entries_.data() + base(skew, index), ways_};
  }

  const TagEntry& at(uint64_t flat) const { return entries_[flat]; }
  const TagEntry& at(const EntryLocation& loc) const {
    return entries_[flat_index(loc)];
  }
  uint64_t flat_index(const EntryLocation& loc) const {
    return base(loc.skew, loc.set) + loc.way;
  }
  EntryLocation location(uint64_t flat) const;

  // Fills an invalid slot. Throws InvariantViolation if it is occupied.
  void fill(const EntryLocation& loc, TagEntry entry);
  // Clears a valid slot and returns what it held.
  TagEntry invalidate(const EntryLocation& loc);
  // In-place update of a valid slot's state bits (coherence, rrip).
  TagEntry& mutate(const EntryLocation& loc) {
    return entries_[flat_index(loc)];
  }

  uint32_t valid_in_set(uint32_t skew, uint32_t index) const {
    return set_valid_[uint64_t{skew} * sets_ + index];
  }
  uint64_t valid_in_skew(uint32_t skew) const { return skew_valid_[skew]; }
  uint64_t valid_count() const;

  // Recomputed from the entries rather than the maintained counters.
  uint32_t rescan_set(uint32_t skew, uint32_t index) const;
  uint64_t recount_valid() const;
  uint64_t count_dirty() const;

  void clear();

 private:
  uint64_t base(uint32_t skew, uint32_t index) const {
    return (uint64_t{skew} * sets_ + index) * ways_;
  }

  uint32_t skews_ = 0;
  uint32_t sets_ = 0;
  uint32_t ways_ = 0;
  std::vector<TagEntry> entries_;
  std::vector<uint16_t> set_valid_;
  std::vector<uint64_t> skew_valid_;
};

// Unique valid way holding `tag` (and `sdid` when match_sdid). Two matching
// ways mean the store is corrupt: throws InvariantViolation.
std::optional<uint32_t> match(std::span<const TagEntry> set, uint64_t tag,
                              Sdid sdid, bool match_sdid);

// SRRIP victim: lowest invalid way, else lowest way at rrip 7 after aging
// every way until one gets there. Ages entries in place; never looks outside
// the span it is given.
uint32_t srrip_select_victim(std::span<TagEntry> ways);

TagEntry rrip_on_fill(TagEntry entry);
TagEntry rrip_on_hit(TagEntry entry);

}  // namespace avatar

#endif  // AVATAR_CACHE_CORE_HPP_

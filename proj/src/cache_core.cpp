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

#include "avatar/cache_core.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "avatar/address_randomizer.hpp"

namespace avatar {

std::string_view to_string(OperatingMode mode) {
  switch (mode) {
    case OperatingMode::AvatarN: return "avatar-n";
    case OperatingMode::AvatarR: return "avatar-r";
    case OperatingMode::AvatarP: return "avatar-p";
  }
  return "unknown";
}

OperatingMode parse_mode(std::string_view text) {
  if (text == "avatar-n" || text == "N" || text == "n") {
    return OperatingMode::AvatarN;
  }
  if (text == "avatar-r" || text == "R" || text == "r") {
    return OperatingMode::AvatarR;
  }
  if (text == "avatar-p" || text == "P" || text == "p") {
    return OperatingMode::AvatarP;
  }
  throw ConfigError("unknown mode '" + std::string(text) + "'");
}

OperatingMode mode_from_msr(uint8_t bits) {
  switch (bits & 0b11) {
    case 0b00: return OperatingMode::AvatarN;
    case 0b01: return OperatingMode::AvatarR;
    case 0b11: return OperatingMode::AvatarP;
    default: throw ConfigError("mode bits 10 are reserved");
  }
}

// ---- geometry --------------------------------------------------------------

CacheGeometry CacheGeometry::defaults(OperatingMode mode) {
  switch (mode) {
    case OperatingMode::AvatarN: return make(mode, 16384, 16, 1, 0);
    case OperatingMode::AvatarR: return make(mode, 1024, 128, 2, 7);
    case OperatingMode::AvatarP: return make(mode, 1024, 256, 1, 0);
  }
  throw ConfigError("unknown mode");
}

CacheGeometry CacheGeometry::make(OperatingMode mode, uint32_t sets,
                                  uint32_t ways, uint32_t skews,
                                  uint32_t invalid_ways) {
  CacheGeometry g;
  g.mode = mode;
  g.num_sets = sets;
  g.ways_per_set = ways;
  g.num_skews = skews;
  g.invalid_ways_per_skew = invalid_ways;
  g.tag_bits = is_power_of_two(sets)
                   ? LineAddress::kBits - log2_exact(sets)
                   : 0;
  g.validate();
  return g;
}

uint32_t CacheGeometry::index_bits() const { return log2_exact(num_sets); }

void CacheGeometry::validate() const {
  if (!is_power_of_two(num_sets) || num_sets > (uint64_t{1} << 32)) {
    throw ConfigError("set count must be a power of two");
  }
  if (ways_per_set == 0 || ways_per_set > 256) {
    throw ConfigError("ways per set must be in [1, 256]");
  }
  if (invalid_ways_per_skew >= ways_per_set) {
    throw ConfigError("invalid ways must leave at least one usable way");
  }
  const bool randomized = mode == OperatingMode::AvatarR;
  if (randomized && num_skews != 2) {
    throw ConfigError("Avatar-R needs exactly two skews");
  }
  if (!randomized && (num_skews != 1 || invalid_ways_per_skew != 0)) {
    throw ConfigError("Avatar-N/P use one skew and no reserved invalid ways");
  }
  if (tag_bits + index_bits() != LineAddress::kBits) {
    throw ConfigError("tag and index bits must cover the 40-bit line address");
  }
}

// ---- hardware layout -------------------------------------------------------

HardwareTagLayout hardware_layout(OperatingMode mode) {
  switch (mode) {
    case OperatingMode::AvatarN: return {26, 3, 3, 0};
    case OperatingMode::AvatarR:
    case OperatingMode::AvatarP: return {30, 3, 3, 4};
  }
  throw ConfigError("unknown mode");
}

uint64_t pack_hardware_entry(const TagEntry& entry, OperatingMode mode) {
  const HardwareTagLayout layout = hardware_layout(mode);
  const auto field = [](uint64_t v, uint32_t bits) {
    return v & ((uint64_t{1} << bits) - 1);
  };
  uint64_t word = field(entry.tag(), layout.tag_bits);
  word = (word << layout.coherence_bits) |
         field(static_cast<uint8_t>(entry.coherence()), layout.coherence_bits);
  word = (word << layout.rrip_bits) | field(entry.rrip(), layout.rrip_bits);
  if (layout.sdid_bits > 0) {
    word = (word << layout.sdid_bits) | field(entry.sdid(), layout.sdid_bits);
  }
  return word;
}

// ---- tag store -------------------------------------------------------------

TagStore::TagStore(uint32_t skews, uint32_t sets, uint32_t ways)
    : skews_(skews),
      sets_(sets),
      ways_(ways),
      entries_(uint64_t{skews} * sets * ways),
      set_valid_(uint64_t{skews} * sets, 0),
      skew_valid_(skews, 0) {}

EntryLocation TagStore::location(uint64_t flat) const {
  EntryLocation loc;
  loc.way = static_cast<uint32_t>(flat % ways_);
  const uint64_t set_id = flat / ways_;
  loc.set = static_cast<uint32_t>(set_id % sets_);
  loc.skew = static_cast<uint32_t>(set_id / sets_);
  return loc;
}

void TagStore::fill(const EntryLocation& loc, TagEntry entry) {
  TagEntry& slot = entries_[flat_index(loc)];
  if (slot.valid()) throw InvariantViolation("fill into a valid slot");
  slot = entry;
  ++set_valid_[uint64_t{loc.skew} * sets_ + loc.set];
  ++skew_valid_[loc.skew];
}

TagEntry TagStore::invalidate(const EntryLocation& loc) {
  TagEntry& slot = entries_[flat_index(loc)];
  if (!slot.valid()) throw InvariantViolation("invalidate of an empty slot");
  const TagEntry old = slot;
  slot.invalidate();
  --set_valid_[uint64_t{loc.skew} * sets_ + loc.set];
  --skew_valid_[loc.skew];
  return old;
}

uint64_t TagStore::valid_count() const {
  return std::accumulate(skew_valid_.begin(), skew_valid_.end(), uint64_t{0});
}

uint32_t TagStore::rescan_set(uint32_t skew, uint32_t index) const {
  const auto ways = set(skew, index);
  return static_cast<uint32_t>(
      std::count_if(ways.begin(), ways.end(),
                    [](const TagEntry& e) { return e.valid(); }));
}

uint64_t TagStore::recount_valid() const {
  return static_cast<uint64_t>(
      std::count_if(entries_.begin(), entries_.end(),
                    [](const TagEntry& e) { return e.valid(); }));
}

uint64_t TagStore::count_dirty() const {
  return static_cast<uint64_t>(
      std::count_if(entries_.begin(), entries_.end(),
                    [](const TagEntry& e) { return e.dirty(); }));
}

void TagStore::clear() {
  std::fill(entries_.begin(), entries_.end(), TagEntry{});
  std::fill(set_valid_.begin(), set_valid_.end(), 0);
  std::fill(skew_valid_.begin(), skew_valid_.end(), 0);
}

// ---- matching and replacement ---------------------------------------------

std::optional<uint32_t> match(std::span<const TagEntry> set, uint64_t tag,
                              Sdid sdid, bool match_sdid) {
  const uint64_t mask = TagEntry::kValidBit | TagEntry::kTagMask |
                        (match_sdid ? TagEntry::kSdidMask : 0);
  const uint64_t want = TagEntry::make(tag, sdid, Coherence::I).raw() & mask;
  // Count first: a branch-free reduction the compiler can vectorize. Every
  // way is checked, so a duplicate is always caught.
  // The 64-bit test is folded to 32 bits since SSE2 has no 64-bit compare.
  uint32_t hits = 0;
  for (const TagEntry& e : set) {
    const uint64_t diff = (e.raw() & mask) ^ want;
    hits += (static_cast<uint32_t>(diff) | static_cast<uint32_t>(diff >> 32)) ==
            0;
  }
  if (hits == 0) return std::nullopt;
  if (hits > 1) throw InvariantViolation("duplicate tag in one set");
  uint32_t w = 0;
  while ((set[w].raw() & mask) != want) ++w;
  return w;
}

uint32_t srrip_select_victim(std::span<TagEntry> ways) {
  for (uint32_t w = 0; w < ways.size(); ++w) {
    if (!ways[w].valid()) return w;
  }
  for (;;) {
    for (uint32_t w = 0; w < ways.size(); ++w) {
      if (ways[w].rrip() == kRripMax) return w;
    }
    for (TagEntry& e : ways) e.set_rrip(e.rrip() + 1);
  }
}

TagEntry rrip_on_fill(TagEntry entry) {
  entry.set_rrip(kRripFill);
  return entry;
}

TagEntry rrip_on_hit(TagEntry entry) {
  entry.set_rrip(kRripHit);
  return entry;
}

}  // namespace avatar

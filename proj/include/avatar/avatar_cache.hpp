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

#ifndef AVATAR_AVATAR_CACHE_HPP_
#define AVATAR_AVATAR_CACHE_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "avatar/address_randomizer.hpp"
#include "avatar/cache_core.hpp"
#include "avatar/geometry.hpp"
#include "avatar/rng.hpp"
#include "avatar/types.hpp"

namespace avatar {

enum class Op : uint8_t { Read, Write, Flush };

struct AccessRequest {
  Sdid sdid = 0;
  Op op = Op::Read;
  uint64_t physical_address = 0;

  LineAddress line() const {
    return LineAddress::from_physical(physical_address);
  }
};

enum class Outcome : uint8_t {
  Hit,
  MissInstalled,
  MissBypassed,
  Flushed,
  FlushMiss,  // flush of a line the requester does not hold
  RejectedUnstable,
};

std::string_view to_string(Outcome outcome);

struct EvictedLine {
  LineAddress address;
  Sdid sdid = 0;
  bool dirty = false;

  friend bool operator==(const EvictedLine&, const EvictedLine&) = default;
};

struct AccessResult {
  Outcome outcome = Outcome::Hit;
  // Line displaced from the indexed set(s): the set-conflict victim in N/P, or
  // the SAE victim in R.
  std::optional<EvictedLine> evicted;
  // Avatar-R only: victim of the global random eviction done before the fill.
  std::optional<EvictedLine> global_evicted;
  bool sae = false;
  uint32_t latency_cycles = 0;

  bool is_hit() const { return outcome == Outcome::Hit; }
};

struct LatencyModel {
  uint32_t hit_cycles = 20;
  uint32_t memory_cycles = 200;
  uint32_t cipher_cycles = 4;
};

struct WayRange {
  uint32_t first = 0;
  uint32_t count = 0;
  uint32_t end() const { return first + count; }

  friend bool operator==(const WayRange&, const WayRange&) = default;
};

// Static way partition for Avatar-P: each domain owns one contiguous range.
class PartitionMap {
 public:
  PartitionMap() = default;

  // `domains` equal ranges covering `total_ways`.
  static PartitionMap uniform(uint32_t domains, uint32_t total_ways);
  // "sdid:first-last,..." with inclusive way bounds, e.g. "0:0-127,1:128-255".
  static PartitionMap parse(std::string_view text);

  void assign(Sdid sdid, WayRange range);
  const WayRange* find(Sdid sdid) const;
  uint32_t domains() const;
  // Throws ConfigError on overlap, empty ranges, or ways out of bounds.
  void validate(uint32_t total_ways) const;
  std::string to_string() const;

  friend bool operator==(const PartitionMap&, const PartitionMap&) = default;

 private:
  std::vector<std::optional<WayRange>> ranges_;
};

struct EngineOptions {
  LatencyModel latency;
  // SDID-qualified lookup. Unset means off in Avatar-N, on in R and P.
  std::optional<bool> match_sdid;
  PartitionMap partitions = PartitionMap::uniform(16, 256);
  Sdid max_domains = kDefaultMaxDomains;
  uint32_t eviction_rejection_limit = 64;
};

// Reads and writes only: accesses == hits + misses, and bypassed accesses
// are counted as misses. Flush requests and rejected attempts are separate.
struct DomainCounters {
  uint64_t accesses = 0;
  uint64_t hits = 0;
  uint64_t misses = 0;
  uint64_t bypassed = 0;
  uint64_t rejected = 0;
  uint64_t flushes = 0;
  uint64_t flushed_lines = 0;
  uint64_t installs = 0;
  uint64_t sae = 0;
  uint64_t lines_evicted = 0;  // this domain's lines pushed out by anyone
  uint64_t writebacks = 0;     // this domain's dirty lines written back

  friend bool operator==(const DomainCounters&, const DomainCounters&) = default;
};

struct EngineStats {
  std::vector<DomainCounters> domains;
  uint64_t installs = 0;
  uint64_t sae_count = 0;
  uint64_t set_conflict_evictions = 0;
  uint64_t global_evictions = 0;
  uint64_t writebacks = 0;
  uint64_t eviction_fallback_scans = 0;
};

struct SaeReport {
  uint64_t sae_count = 0;
  uint64_t installs = 0;
  double installs_per_sae = 0.0;
};

struct InvalidationScan {
  uint64_t lines_scanned = 0;
  uint64_t valid_lines = 0;
  uint64_t dirty_lines = 0;
};

struct SetRef {
  uint32_t skew = 0;
  uint32_t set = 0;

  friend bool operator==(const SetRef&, const SetRef&) = default;
};

// The morphable LLC tag store and its mode-specific access path. One logical
// access stream per instance; copies are independent caches.
class AvatarCache {
 public:
  AvatarCache(const CacheGeometry& geometry, EngineOptions options,
              uint64_t seed);

  // Assumes the controller has checked the stable bit.
  AccessResult access(const AccessRequest& req);

  // Mode-specific miss paths, exposed for direct testing. The line must not
  // already be present for `sdid`.
  AccessResult install_randomized(LineAddress line, Sdid sdid, bool dirty);
  AccessResult install_partitioned(LineAddress line, Sdid sdid, bool dirty);
  AccessResult install_set_associative(LineAddress line, Sdid sdid,
                                       bool dirty);

  // Uniform over every valid entry in the cache. Throws InvariantViolation if
  // the cache is empty.
  EvictedLine global_random_evict();

  SaeReport sae_monitor() const;

  // Accounts an access the controller answered without reaching the tag
  // store (bypassed or rejected during a switch).
  void record_unserviced(Sdid sdid, Outcome outcome);

  // Invalidates every entry (all state bits cleared) and resets the counter.
  InvalidationScan invalidate_all();
  // Switches geometry: invalidates everything and draws fresh skew keys.
  void reconfigure(const CacheGeometry& geometry);
  void rekey();

  const CacheGeometry& geometry() const { return geometry_; }
  OperatingMode mode() const { return geometry_.mode; }
  const EngineOptions& options() const { return options_; }
  bool sdid_matching() const { return match_sdid_; }

  // Privileged inspection; none of this is visible to attack code.
  uint64_t valid_count() const { return valid_counter_; }
  uint64_t threshold() const { return threshold_; }
  uint64_t recount_valid() const { return store_.recount_valid(); }
  uint64_t invalid_in_skew(uint32_t skew) const;
  std::vector<SetRef> candidate_sets(LineAddress line, Sdid sdid = 0) const;
  std::optional<EntryLocation> find(LineAddress line, Sdid sdid) const;
  const TagStore& tag_store() const { return store_; }
  const EngineStats& stats() const { return stats_; }
  uint64_t dirty_lines() const { return store_.count_dirty(); }

  // Counter audits; both throw InvariantViolation. audit_access rescans only
  // the sets an access could have changed, which is enough to keep the
  // counter equal to a full scan by induction. audit_full scans everything.
  void audit_access(LineAddress line, const AccessResult& result) const;
  void audit_full() const;

 private:
  struct Slot {
    uint32_t skew;
    IndexTag it;
  };

  uint32_t latency_base() const;
  std::optional<EntryLocation> lookup(LineAddress line, Sdid sdid,
                                      bool qualify) const;
  Slot slot_for(LineAddress line, uint32_t skew) const;
  const WayRange& range_for(Sdid sdid) const;
  LineAddress address_of(const EntryLocation& loc, const TagEntry& e) const;
  EvictedLine evict(const EntryLocation& loc);
  void install_at(const EntryLocation& loc, uint64_t tag, Sdid sdid,
                  bool dirty, bool use_rrip);
  DomainCounters& domain(Sdid sdid);
  void check_sdid(Sdid sdid) const;

  CacheGeometry geometry_;
  EngineOptions options_;
  bool match_sdid_ = false;
  Rng rng_;
  TagStore store_;
  std::array<SkewMapper, 2> mappers_{};
  uint64_t valid_counter_ = 0;
  uint64_t threshold_ = 0;
  EngineStats stats_;
};

}  // namespace avatar

#endif  // AVATAR_AVATAR_CACHE_HPP_

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

#include "avatar/avatar_cache.hpp"

#include <charconv>
#include <sstream>
#include <stdexcept>

namespace avatar {

std::string_view to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::Hit: return "hit";
    case Outcome::MissInstalled: return "miss-installed";
    case Outcome::MissBypassed: return "miss-bypassed";
    case Outcome::Flushed: return "flushed";
    case Outcome::FlushMiss: return "flush-miss";
    case Outcome::RejectedUnstable: return "rejected-unstable";
  }
  return "unknown";
}

// ---- partition map ---------------------------------------------------------

PartitionMap PartitionMap::uniform(uint32_t domains, uint32_t total_ways) {
  if (domains == 0 || total_ways % domains != 0) {
    throw ConfigError("ways do not split evenly across domains");
  }
  PartitionMap map;
  const uint32_t width = total_ways / domains;
  for (uint32_t d = 0; d < domains; ++d) {
    map.assign(static_cast<Sdid>(d), {d * width, width});
  }
  return map;
}

namespace {

uint32_t parse_u32(std::string_view s, std::string_view what) {
  uint32_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ConfigError("bad " + std::string(what) + " '" + std::string(s) +
                      "' in partition map");
  }
  return v;
}

}  // namespace

PartitionMap PartitionMap::parse(std::string_view text) {
  PartitionMap map;
  while (!text.empty()) {
    const size_t comma = text.find(',');
    std::string_view item = text.substr(0, comma);
    text = comma == std::string_view::npos ? std::string_view{}
                                           : text.substr(comma + 1);
    const size_t colon = item.find(':');
    const size_t dash = item.find('-');
    if (colon == std::string_view::npos || dash == std::string_view::npos ||
        dash < colon) {
      throw ConfigError("partition entry '" + std::string(item) +
                        "' is not sdid:first-last");
    }
    const uint32_t sdid = parse_u32(item.substr(0, colon), "sdid");
    const uint32_t first =
        parse_u32(item.substr(colon + 1, dash - colon - 1), "way");
    const uint32_t last = parse_u32(item.substr(dash + 1), "way");
    if (last < first) throw ConfigError("partition range is reversed");
    if (sdid > 255) throw ConfigError("sdid exceeds 255 in partition map");
    map.assign(static_cast<Sdid>(sdid), {first, last - first + 1});
  }
  return map;
}

void PartitionMap::assign(Sdid sdid, WayRange range) {
  if (ranges_.size() <= sdid) ranges_.resize(sdid + 1u);
  ranges_[sdid] = range;
}

const WayRange* PartitionMap::find(Sdid sdid) const {
  if (sdid >= ranges_.size() || !ranges_[sdid]) return nullptr;
  return &*ranges_[sdid];
}

uint32_t PartitionMap::domains() const {
  uint32_t n = 0;
  for (const auto& r : ranges_) n += r.has_value();
  return n;
}

void PartitionMap::validate(uint32_t total_ways) const {
  std::vector<int> owner(total_ways, -1);
  for (size_t d = 0; d < ranges_.size(); ++d) {
    if (!ranges_[d]) continue;
    const WayRange& r = *ranges_[d];
    if (r.count == 0) throw ConfigError("empty way range for a domain");
    if (r.end() > total_ways) {
      throw ConfigError("way range of sdid " + std::to_string(d) +
                        " exceeds the set's ways");
    }
    for (uint32_t w = r.first; w < r.end(); ++w) {
      if (owner[w] >= 0) {
        throw ConfigError("way " + std::to_string(w) + " assigned to sdid " +
                          std::to_string(owner[w]) + " and sdid " +
                          std::to_string(d));
      }
      owner[w] = static_cast<int>(d);
    }
  }
}

std::string PartitionMap::to_string() const {
  std::ostringstream out;
  bool first = true;
  for (size_t d = 0; d < ranges_.size(); ++d) {
    if (!ranges_[d]) continue;
    if (!first) out << ',';
    first = false;
    out << d << ':' << ranges_[d]->first << '-' << ranges_[d]->end() - 1;
  }
  return out.str();
}

// ---- engine ----------------------------------------------------------------

AvatarCache::AvatarCache(const CacheGeometry& geometry, EngineOptions options,
                         uint64_t seed)
    : geometry_(geometry), options_(std::move(options)), rng_(seed) {
  stats_.domains.resize(options_.max_domains);
  reconfigure(geometry);
}

void AvatarCache::reconfigure(const CacheGeometry& geometry) {
  geometry.validate();
  if (geometry.mode == OperatingMode::AvatarP) {
    options_.partitions.validate(geometry.ways_per_set);
  }
  geometry_ = geometry;
  store_ = TagStore(geometry.num_skews, geometry.num_sets,
                    geometry.ways_per_set);
  valid_counter_ = 0;
  threshold_ = geometry.valid_capacity_threshold();
  match_sdid_ =
      options_.match_sdid.value_or(geometry.mode != OperatingMode::AvatarN);
  rekey();
}

void AvatarCache::rekey() {
  const uint64_t k0 = rng_.next();
  uint64_t k1 = rng_.next();
  while (k1 == k0) k1 = rng_.next();
  const uint32_t bits = geometry_.index_bits();
  mappers_[0] = SkewMapper({k0, 0}, bits);
  mappers_[1] = SkewMapper({k1, 1}, bits);
}

uint32_t AvatarCache::latency_base() const {
  uint32_t cycles = options_.latency.hit_cycles;
  if (geometry_.mode == OperatingMode::AvatarR) {
    cycles += options_.latency.cipher_cycles;
  }
  return cycles;
}

DomainCounters& AvatarCache::domain(Sdid sdid) { return stats_.domains[sdid]; }

void AvatarCache::check_sdid(Sdid sdid) const {
  if (sdid >= options_.max_domains) {
    throw std::out_of_range("sdid " + std::to_string(sdid) +
                            " exceeds the configured domain count");
  }
}

const WayRange& AvatarCache::range_for(Sdid sdid) const {
  const WayRange* range = options_.partitions.find(sdid);
  if (range == nullptr) {
    throw ConfigError("sdid " + std::to_string(sdid) +
                      " has no way allocation in Avatar-P");
  }
  return *range;
}

AvatarCache::Slot AvatarCache::slot_for(LineAddress line,
                                        uint32_t skew) const {
  if (geometry_.mode == OperatingMode::AvatarR) {
    return {skew, mappers_[skew].locate(line)};
  }
  return {0, plain_index_and_tag(line, geometry_.mode, geometry_)};
}

std::vector<SetRef> AvatarCache::candidate_sets(LineAddress line,
                                                Sdid sdid) const {
  (void)sdid;
  std::vector<SetRef> sets;
  for (uint32_t s = 0; s < geometry_.num_skews; ++s) {
    sets.push_back({s, slot_for(line, s).it.index});
  }
  return sets;
}

std::optional<EntryLocation> AvatarCache::lookup(LineAddress line, Sdid sdid,
                                                 bool qualify) const {
  std::optional<EntryLocation> found;
  for (uint32_t s = 0; s < geometry_.num_skews; ++s) {
    const Slot slot = slot_for(line, s);
    auto ways = store_.set(s, slot.it.index);
    uint32_t offset = 0;
    if (geometry_.mode == OperatingMode::AvatarP) {
      const WayRange& r = range_for(sdid);
      ways = ways.subspan(r.first, r.count);
      offset = r.first;
    }
    if (auto w = match(ways, slot.it.tag, sdid, qualify)) {
      if (found) throw InvariantViolation("line present in both skews");
      found = EntryLocation{s, slot.it.index, *w + offset};
    }
  }
  return found;
}

std::optional<EntryLocation> AvatarCache::find(LineAddress line,
                                               Sdid sdid) const {
  return lookup(line, sdid, match_sdid_);
}

LineAddress AvatarCache::address_of(const EntryLocation& loc,
                                    const TagEntry& e) const {
  if (geometry_.mode == OperatingMode::AvatarR) {
    return mappers_[loc.skew].reconstruct({loc.set, e.tag()});
  }
  return plain_reconstruct({loc.set, e.tag()}, geometry_);
}

EvictedLine AvatarCache::evict(const EntryLocation& loc) {
  const TagEntry old = store_.invalidate(loc);
  --valid_counter_;
  const EvictedLine line{address_of(loc, old), old.sdid(), old.dirty()};
  DomainCounters& owner = domain(line.sdid);
  ++owner.lines_evicted;
  if (line.dirty) {
    ++owner.writebacks;
    ++stats_.writebacks;
  }
  return line;
}

void AvatarCache::install_at(const EntryLocation& loc, uint64_t tag, Sdid sdid,
                             bool dirty, bool use_rrip) {
  TagEntry entry =
      TagEntry::make(tag, sdid, dirty ? Coherence::M : Coherence::E);
  if (use_rrip) entry = rrip_on_fill(entry);
  store_.fill(loc, entry);
  ++valid_counter_;
  ++stats_.installs;
  ++domain(sdid).installs;
  if (valid_counter_ > threshold_) {
    throw InvariantViolation("valid counter exceeds the capacity threshold");
  }
}

AccessResult AvatarCache::access(const AccessRequest& req) {
  check_sdid(req.sdid);
  const LineAddress line = req.line();
  DomainCounters& d = domain(req.sdid);

  AccessResult result;
  result.latency_cycles = latency_base();

  if (req.op == Op::Flush) {
    ++d.flushes;
    const auto loc = lookup(line, req.sdid, /*qualify=*/true);
    if (!loc) {
      result.outcome = Outcome::FlushMiss;
      return result;
    }
    const TagEntry old = store_.invalidate(*loc);
    --valid_counter_;
    ++d.flushed_lines;
    if (old.dirty()) {
      ++d.writebacks;
      ++stats_.writebacks;
    }
    result.outcome = Outcome::Flushed;
    return result;
  }

  ++d.accesses;
  const bool write = req.op == Op::Write;
  if (const auto loc = lookup(line, req.sdid, match_sdid_)) {
    ++d.hits;
    TagEntry& e = store_.mutate(*loc);
    if (write) e.set_coherence(Coherence::M);
    if (geometry_.mode != OperatingMode::AvatarR) e = rrip_on_hit(e);
    result.outcome = Outcome::Hit;
    return result;
  }

  ++d.misses;
  const uint32_t latency =
      result.latency_cycles + options_.latency.memory_cycles;
  switch (geometry_.mode) {
    case OperatingMode::AvatarN:
      result = install_set_associative(line, req.sdid, write);
      break;
    case OperatingMode::AvatarR:
      result = install_randomized(line, req.sdid, write);
      break;
    case OperatingMode::AvatarP:
      result = install_partitioned(line, req.sdid, write);
      break;
  }
  result.latency_cycles = latency;
  return result;
}

AccessResult AvatarCache::install_set_associative(LineAddress line, Sdid sdid,
                                                  bool dirty) {
  const IndexTag it = plain_index_and_tag(line, geometry_.mode, geometry_);
  auto ways = store_.set(0, it.index);
  const EntryLocation loc{0, it.index, srrip_select_victim(ways)};
  AccessResult result;
  result.outcome = Outcome::MissInstalled;
  if (store_.at(loc).valid()) {
    result.evicted = evict(loc);
    result.sae = true;
    ++stats_.set_conflict_evictions;
    ++stats_.sae_count;
    ++domain(sdid).sae;
  }
  install_at(loc, it.tag, sdid, dirty, /*use_rrip=*/true);
  return result;
}

AccessResult AvatarCache::install_partitioned(LineAddress line, Sdid sdid,
                                              bool dirty) {
  if (geometry_.mode != OperatingMode::AvatarP) {
    throw std::logic_error("install_partitioned outside Avatar-P");
  }
  const WayRange& range = range_for(sdid);
  const IndexTag it = plain_index_and_tag(line, geometry_.mode, geometry_);
  auto ways = store_.set(0, it.index).subspan(range.first, range.count);
  const EntryLocation loc{0, it.index,
                          range.first + srrip_select_victim(ways)};
  AccessResult result;
  result.outcome = Outcome::MissInstalled;
  if (store_.at(loc).valid()) {
    result.evicted = evict(loc);
    result.sae = true;
    ++stats_.set_conflict_evictions;
    ++stats_.sae_count;
    ++domain(sdid).sae;
  }
  install_at(loc, it.tag, sdid, dirty, /*use_rrip=*/true);
  return result;
}

AccessResult AvatarCache::install_randomized(LineAddress line, Sdid sdid,
                                             bool dirty) {
  if (geometry_.mode != OperatingMode::AvatarR) {
    throw std::logic_error("install_randomized outside Avatar-R");
  }
  AccessResult result;
  result.outcome = Outcome::MissInstalled;
  if (valid_counter_ >= threshold_) {
    result.global_evicted = global_random_evict();
  }

  const uint32_t ways = geometry_.ways_per_set;
  const std::array<Slot, 2> slots{slot_for(line, 0), slot_for(line, 1)};
  const uint32_t invalid0 = ways - store_.valid_in_set(0, slots[0].it.index);
  const uint32_t invalid1 = ways - store_.valid_in_set(1, slots[1].it.index);

  EntryLocation loc;
  if (invalid0 == 0 && invalid1 == 0) {
    const uint32_t skew = rng_.coin() ? 1 : 0;
    loc = {skew, slots[skew].it.index,
           static_cast<uint32_t>(rng_.below(ways))};
    result.evicted = evict(loc);
    result.sae = true;
    ++stats_.sae_count;
    ++domain(sdid).sae;
  } else {
    uint32_t skew;
    if (invalid0 != invalid1) {
      skew = invalid0 > invalid1 ? 0 : 1;
    } else {
      skew = rng_.coin() ? 1 : 0;
    }
    const auto set = store_.set(skew, slots[skew].it.index);
    uint32_t way = 0;
    while (set[way].valid()) ++way;
    loc = {skew, slots[skew].it.index, way};
  }
  install_at(loc, slots[loc.skew].it.tag, sdid, dirty, /*use_rrip=*/false);
  return result;
}

EvictedLine AvatarCache::global_random_evict() {
  if (valid_counter_ == 0) {
    throw InvariantViolation("global eviction from an empty cache");
  }
  ++stats_.global_evictions;
  const uint64_t total = store_.size();
  for (uint32_t i = 0; i < options_.eviction_rejection_limit; ++i) {
    const uint64_t flat = rng_.below(total);
    if (store_.at(flat).valid()) return evict(store_.location(flat));
  }
  ++stats_.eviction_fallback_scans;
  uint64_t k = rng_.below(valid_counter_);
  for (uint64_t flat = 0; flat < total; ++flat) {
    if (!store_.at(flat).valid()) continue;
    if (k-- == 0) return evict(store_.location(flat));
  }
  throw InvariantViolation("valid counter exceeds the valid entries");
}

SaeReport AvatarCache::sae_monitor() const {
  SaeReport r;
  r.sae_count = stats_.sae_count;
  r.installs = stats_.installs;
  r.installs_per_sae = static_cast<double>(stats_.installs) /
                       static_cast<double>(std::max<uint64_t>(1, r.sae_count));
  return r;
}

void AvatarCache::record_unserviced(Sdid sdid, Outcome outcome) {
  check_sdid(sdid);
  DomainCounters& d = domain(sdid);
  if (outcome == Outcome::MissBypassed) {
    ++d.accesses;
    ++d.misses;
    ++d.bypassed;
  } else {
    ++d.rejected;
  }
}

InvalidationScan AvatarCache::invalidate_all() {
  InvalidationScan scan;
  scan.lines_scanned = store_.size();
  scan.valid_lines = store_.recount_valid();
  scan.dirty_lines = store_.count_dirty();
  store_.clear();
  valid_counter_ = 0;
  return scan;
}

void AvatarCache::audit_access(LineAddress line,
                               const AccessResult& result) const {
  auto check = [this](LineAddress l) {
    for (const SetRef& ref : candidate_sets(l)) {
      if (store_.rescan_set(ref.skew, ref.set) !=
          store_.valid_in_set(ref.skew, ref.set)) {
        throw InvariantViolation("per-set valid count disagrees with a scan");
      }
    }
  };
  check(line);
  if (result.evicted) check(result.evicted->address);
  if (result.global_evicted) check(result.global_evicted->address);
  if (store_.valid_count() != valid_counter_) {
    throw InvariantViolation("global valid counter disagrees with the store");
  }
  if (geometry_.mode == OperatingMode::AvatarR && valid_counter_ > threshold_) {
    throw InvariantViolation("valid counter above the capacity threshold");
  }
}

void AvatarCache::audit_full() const {
  uint64_t total = 0;
  for (uint32_t k = 0; k < geometry_.num_skews; ++k) {
    for (uint32_t i = 0; i < geometry_.num_sets; ++i) {
      const uint32_t n = store_.rescan_set(k, i);
      if (n != store_.valid_in_set(k, i)) {
        throw InvariantViolation("per-set valid count disagrees with a scan");
      }
      total += n;
    }
  }
  if (total != valid_counter_ || store_.valid_count() != valid_counter_) {
    throw InvariantViolation("global valid counter disagrees with a scan");
  }
  if (geometry_.mode == OperatingMode::AvatarR && valid_counter_ > threshold_) {
    throw InvariantViolation("valid counter above the capacity threshold");
  }
}

uint64_t AvatarCache::invalid_in_skew(uint32_t skew) const {
  return uint64_t{geometry_.num_sets} * geometry_.ways_per_set -
         store_.valid_in_skew(skew);
}

}  // namespace avatar

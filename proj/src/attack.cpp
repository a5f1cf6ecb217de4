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


#include "avatar/attack.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_set>

namespace avatar {

nlohmann::ordered_json to_json(const ChannelReport& r) {
  return {{"attack", r.attack},
          {"success", r.success},
          {"statistic", r.statistic},
          {"accesses_used", r.accesses_used},
          {"details", r.details}};
}

AttackerPort::AttackerPort(ModeController& system, Sdid sdid,
                           const AttackBudget& budget,
                           uint32_t timing_noise_cycles)
    : system_(system),
      sdid_(sdid),
      budget_(budget),
      noise_(timing_noise_cycles),
      rng_(budget.rng_seed) {
  // Public platform timing: anything slower than half a memory round trip
  // past the hit latency is a miss.
  const LatencyModel& lat = system.cache().options().latency;
  hit_threshold_ = lat.hit_cycles + lat.cipher_cycles + lat.memory_cycles / 2;
}

uint32_t AttackerPort::touch(LineAddress line, Op op) {
  if (accesses_ >= budget_.max_accesses) {
    throw BudgetExhausted("attacker access budget exhausted");
  }
  ++accesses_;
  const AccessResult r = system_.access({sdid_, op, line.physical()});
  uint32_t cycles = r.latency_cycles;
  if (r.outcome == Outcome::RejectedUnstable) {
    const LatencyModel& lat = system_.cache().options().latency;
    cycles = lat.hit_cycles + lat.memory_cycles;
  }
  if (noise_ != 0) cycles += static_cast<uint32_t>(rng_.below(noise_ + 1));
  return cycles;
}

void AttackerPort::flush(LineAddress line) {
  if (flushes_ >= budget_.max_flushes) {
    throw BudgetExhausted("attacker flush budget exhausted");
  }
  ++flushes_;
  system_.access({sdid_, Op::Flush, line.physical()});
}

// ---- eviction-set discovery -------------------------------------------------

namespace {

void traverse(AttackerPort& a, std::span<const LineAddress> set,
              uint32_t passes) {
  for (uint32_t p = 0; p < passes; ++p) {
    for (LineAddress l : set) a.touch(l);
  }
}

uint64_t probe(AttackerPort& a, std::span<const LineAddress> set) {
  uint64_t misses = 0;
  for (LineAddress l : set) misses += a.hit(l) ? 0 : 1;
  return misses;
}

}  // namespace

EvictionSearchResult find_eviction_set(AttackerPort& attacker,
                                       VictimPort& victim, LineAddress target,
                                       const EvictionSearchParams& params) {
  EvictionSearchResult result;
  Rng& rng = attacker.rng();
  const uint32_t k = params.known_index_bits;
  const uint64_t low = target.value() & ((uint64_t{1} << k) - 1);
  const uint64_t high_space = uint64_t{1} << (LineAddress::kBits - k);
  std::unordered_set<uint64_t> used{target.value()};

  auto draw = [&] {
    while (true) {
      const uint64_t v = (rng.below(high_space) << k) | low;
      if (used.insert(v).second) return LineAddress(v);
    }
  };
  auto evicts = [&](std::span<const LineAddress> set) {
    ++result.tests;
    for (uint32_t i = 0; i < std::max(1u, params.test_repeats); ++i) {
      attacker.touch(target);
      traverse(attacker, set, params.passes);
      if (attacker.hit(target)) return false;
    }
    return true;
  };

  std::vector<LineAddress> pool;
  try {
    for (uint32_t i = 0; i < params.initial_pool; ++i) pool.push_back(draw());
    while (!evicts(pool)) {
      if (pool.size() * 2 > params.max_pool) {
        result.pool_size = pool.size();
        result.stop_reason = "pool-limit";
        result.accesses_used = attacker.accesses_used();
        return result;
      }
      const size_t n = pool.size();
      for (size_t i = 0; i < n; ++i) pool.push_back(draw());
    }
    result.pool_size = pool.size();

    std::vector<LineAddress> set = std::move(pool);
    std::vector<LineAddress> rest;
    while (set.size() > params.expected_ways) {
      const size_t groups =
          std::min<size_t>(params.expected_ways + 1, set.size());
      bool reduced = false;
      for (size_t g = 0; g < groups && !reduced; ++g) {
        const size_t lo = set.size() * g / groups;
        const size_t hi = set.size() * (g + 1) / groups;
        rest.clear();
        rest.insert(rest.end(), set.begin(), set.begin() + lo);
        rest.insert(rest.end(), set.begin() + hi, set.end());
        if (evicts(rest)) {
          set.swap(rest);
          reduced = true;
        }
      }
      if (!reduced) break;
    }
    result.reduced_size = set.size();

    for (uint32_t r = 0; r < params.confirm_rounds; ++r) {
      traverse(attacker, set, params.passes);
      const uint64_t quiet = probe(attacker, set);
      traverse(attacker, set, params.passes);
      victim.touch(target);
      const uint64_t active = probe(attacker, set);
      if (active <= quiet) {
        result.stop_reason = "unconfirmed";
        result.accesses_used = attacker.accesses_used();
        return result;
      }
    }
    result.set = std::move(set);
    result.stop_reason = "found";
  } catch (const BudgetExhausted&) {
    result.pool_size = std::max<uint64_t>(result.pool_size, pool.size());
    result.stop_reason = "budget";
  }
  result.accesses_used = attacker.accesses_used();
  return result;
}

EvictionSearchResult find_eviction_set(ModeController& system,
                                       LineAddress target, Sdid attacker,
                                       Sdid victim, const AttackBudget& budget,
                                       const EvictionSearchParams& params) {
  AttackerPort a(system, attacker, budget);
  VictimPort v(system, victim);
  return find_eviction_set(a, v, target, params);
}

uint64_t replay_eviction_set(AttackerPort& attacker, VictimPort& victim,
                             std::span<const LineAddress> set,
                             LineAddress target, uint32_t passes) {
  traverse(attacker, set, passes);
  victim.touch(target);
  return probe(attacker, set);
}

ChannelReport eviction_set_report(const EvictionSearchResult& r,
                                  OperatingMode mode) {
  ChannelReport rep;
  rep.attack = "eviction-set";
  rep.success = r.set.has_value();
  rep.statistic = r.set ? static_cast<double>(r.set->size()) : 0.0;
  rep.accesses_used = r.accesses_used;
  rep.details = {{"mode", std::string(to_string(mode))},
                 {"stop_reason", r.stop_reason},
                 {"tests", r.tests},
                 {"pool_size", r.pool_size},
                 {"reduced_size", r.reduced_size}};
  if (r.set) {
    auto lines = nlohmann::ordered_json::array();
    for (LineAddress l : *r.set) lines.push_back(l.value());
    rep.details["lines"] = lines;
  }
  return rep;
}

// ---- occupancy channel ------------------------------------------------------

EngineOptions two_domain_options(Sdid attacker, Sdid victim,
                                 uint32_t total_ways) {
  EngineOptions o;
  PartitionMap map;
  map.assign(attacker, {0, total_ways / 2});
  map.assign(victim, {total_ways / 2, total_ways - total_ways / 2});
  o.partitions = map;
  return o;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  const size_t n = std::min(x.size(), y.size());
  if (n < 2) return 0.0;
  double mx = 0, my = 0;
  for (size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0, sxx = 0, syy = 0;
  for (size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

ChannelReport occupancy_probe(const OccupancyProbeParams& p,
                              const AttackBudget& budget) {
  ChannelReport rep;
  rep.attack = "occupancy";
  Rng rng(budget.rng_seed);

  constexpr uint64_t kVictimBase = uint64_t{1} << 32;
  constexpr uint64_t kVictimSpan = uint64_t{1} << 32;

  std::vector<double> xs;
  std::vector<double> ys;
  std::map<uint64_t, std::pair<double, uint64_t>> per_footprint;
  std::string stop = "complete";
  try {
    for (uint32_t t = 0; t < p.trials; ++t) {
      for (uint64_t footprint : p.footprints) {
        ModeController sys(p.mode, p.controller, p.engine, rng.next());
        AttackBudget left = budget;
        left.max_accesses = budget.max_accesses - rep.accesses_used;
        left.rng_seed = rng.next();
        AttackerPort port(sys, p.attacker, left);
        VictimPort victim(sys, p.victim);

        for (uint64_t a = 0; a < p.attacker_lines; ++a) {
          port.touch(LineAddress(a));
        }
        for (uint64_t j = 0; j < footprint; ++j) {
          victim.touch(LineAddress(kVictimBase + rng.below(kVictimSpan)));
        }
        uint64_t misses = 0;
        for (uint64_t a = 0; a < p.attacker_lines; ++a) {
          misses += port.hit(LineAddress(a)) ? 0 : 1;
        }
        rep.accesses_used += port.accesses_used();
        xs.push_back(static_cast<double>(footprint));
        ys.push_back(static_cast<double>(misses));
        auto& slot = per_footprint[footprint];
        slot.first += static_cast<double>(misses);
        ++slot.second;
      }
    }
  } catch (const BudgetExhausted&) {
    stop = "budget";
  }

  rep.statistic = pearson(xs, ys);
  rep.success = std::abs(rep.statistic) > 0.5;
  auto means = nlohmann::ordered_json::array();
  for (const auto& [f, acc] : per_footprint) {
    means.push_back({{"footprint", f},
                     {"trials", acc.second},
                     {"mean_attacker_misses", acc.first / acc.second}});
  }
  rep.details = {{"mode", std::string(to_string(p.mode))},
                 {"attacker_lines", p.attacker_lines},
                 {"trials_per_footprint", p.trials},
                 {"samples", xs.size()},
                 {"stop_reason", stop},
                 {"footprints", means}};
  return rep;
}

// ---- mode-switch abuse ------------------------------------------------------

ChannelReport switch_dos_probe(ModeController& controller, uint64_t attempts,
                               uint64_t spacing_cycles,
                               FlushStrategy strategy) {
  constexpr OperatingMode kCycle[] = {OperatingMode::AvatarN,
                                      OperatingMode::AvatarR,
                                      OperatingMode::AvatarP};
  ChannelReport rep;
  rep.attack = "switch-dos";
  const uint64_t start = controller.now();
  uint64_t accepted = 0;
  for (uint64_t i = 0; i < attempts; ++i) {
    const OperatingMode cur = controller.mode();
    size_t at = 0;
    while (kCycle[at] != cur) ++at;
    const OperatingMode target = kCycle[(at + 1) % 3];
    if (controller.request_switch(target, strategy, start + i * spacing_cycles)
            .accepted) {
      ++accepted;
    }
  }
  const uint64_t elapsed = attempts == 0 ? 0 : (attempts - 1) * spacing_cycles;
  const uint64_t t_on = std::max<uint64_t>(1, controller.config().t_on_min);
  const uint64_t bound = elapsed / t_on + 1;
  rep.statistic = static_cast<double>(accepted);
  rep.success = accepted > bound;
  rep.details = {{"attempts", attempts},
                 {"spacing_cycles", spacing_cycles},
                 {"elapsed_cycles", elapsed},
                 {"t_on_cycles", controller.config().t_on_min},
                 {"accepted", accepted},
                 {"allowed", bound}};
  return rep;
}

ChannelReport flush_timing_probe(FlushStrategy strategy, uint32_t trials,
                                 const ControllerConfig& controller,
                                 uint64_t seed) {
  ChannelReport rep;
  rep.attack = "flush-timing";
  Rng rng(seed);
  std::vector<double> cycles;
  std::vector<double> dirty;
  for (uint32_t t = 0; t < trials; ++t) {
    ModeController sys(OperatingMode::AvatarN, controller, EngineOptions{},
                       rng.next());
    const double d = rng.uniform();
    const uint64_t lines = controller.geometries.n.total_entries();
    for (uint64_t l = 0; l < lines; ++l) {
      sys.access({0, rng.uniform() < d ? Op::Write : Op::Read,
                  LineAddress(l).physical()});
    }
    const SwitchDecision dec =
        sys.request_switch(OperatingMode::AvatarR, strategy, sys.now());
    cycles.push_back(static_cast<double>(dec.flush->cycles));
    dirty.push_back(dec.flush->dirty_fraction());
  }
  double mean = 0;
  for (double c : cycles) mean += c;
  mean /= std::max<size_t>(1, cycles.size());
  double var = 0;
  for (double c : cycles) var += (c - mean) * (c - mean);
  var /= std::max<size_t>(1, cycles.size());

  rep.statistic = var;
  rep.success = var > 0.0;
  rep.details = {{"strategy", std::string(to_string(strategy))},
                 {"trials", trials},
                 {"mean_cycles", mean},
                 {"cycles", cycles},
                 {"dirty_fractions", dirty}};
  return rep;
}

}  // namespace avatar

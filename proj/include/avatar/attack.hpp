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


#ifndef AVATAR_ATTACK_HPP_
#define AVATAR_ATTACK_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "avatar/mode_controller.hpp"
#include "avatar/rng.hpp"
#include "json.hpp"

namespace avatar {

struct AttackBudget {
  uint64_t max_accesses = 100'000'000;
  uint64_t max_flushes = 0;
  uint64_t rng_seed = 1;
};

struct ChannelReport {
  std::string attack;
  bool success = false;
  double statistic = 0.0;
  uint64_t accesses_used = 0;
  nlohmann::ordered_json details = nlohmann::ordered_json::object();
};

nlohmann::ordered_json to_json(const ChannelReport& report);

class BudgetExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The only view of the system attack code gets: its own requests and their
// latencies. Each access is charged to the budget.
class AttackerPort {
 public:
  AttackerPort(ModeController& system, Sdid sdid, const AttackBudget& budget,
               uint32_t timing_noise_cycles = 0);

  // Returns the observed latency; throws BudgetExhausted when spent.
  uint32_t touch(LineAddress line, Op op = Op::Read);
  bool hit(LineAddress line) { return touch(line) < hit_threshold_; }
  void flush(LineAddress line);

  Sdid sdid() const { return sdid_; }
  uint32_t hit_threshold() const { return hit_threshold_; }
  uint64_t accesses_used() const { return accesses_; }
  uint64_t flushes_used() const { return flushes_; }
  uint64_t remaining() const { return budget_.max_accesses - accesses_; }
  Rng& rng() { return rng_; }

 private:
  ModeController& system_;
  Sdid sdid_;
  AttackBudget budget_;
  uint32_t noise_;
  uint32_t hit_threshold_;
  Rng rng_;
  uint64_t accesses_ = 0;
  uint64_t flushes_ = 0;
};

// Victim activity driven by the harness scheduler. Not budgeted and not
// observable by the attacker.
class VictimPort {
 public:
  VictimPort(ModeController& system, Sdid sdid)
      : system_(system), sdid_(sdid) {}

  void touch(LineAddress line, Op op = Op::Read) {
    system_.access({sdid_, op, line.physical()});
  }
  Sdid sdid() const { return sdid_; }

 private:
  ModeController& system_;
  Sdid sdid_;
};

// ---- eviction-set discovery -------------------------------------------------

struct EvictionSearchParams {
  uint32_t expected_ways = 16;     // group testing splits into ways + 1
  uint32_t known_index_bits = 6;   // low line bits the attacker can match
  uint32_t initial_pool = 12288;
  uint64_t max_pool = uint64_t{1} << 20;
  // Traversals per test. SRRIP keeps a recently hit target through short
  // thrash loops, so a 17-line set needs about eight passes to age it out.
  uint32_t passes = 10;
  // A test counts as evicting only if it does so this many times in a row.
  // Lines dropped from the candidate set stay resident for a while and can
  // make a single test pass spuriously.
  uint32_t test_repeats = 2;
  uint32_t confirm_rounds = 3;
};

struct EvictionSearchResult {
  std::optional<std::vector<LineAddress>> set;
  uint64_t accesses_used = 0;
  uint64_t tests = 0;
  uint64_t pool_size = 0;
  uint64_t reduced_size = 0;
  std::string stop_reason;
};

// Builds a pool of random attacker lines sharing the target's known low bits,
// grows it until it evicts the attacker's copy of the target, shrinks it by
// group testing, then checks against the victim: prime the set, let the
// victim touch the target, probe. Returns a set only if the victim's access
// is visible in every confirmation round.
EvictionSearchResult find_eviction_set(AttackerPort& attacker,
                                       VictimPort& victim, LineAddress target,
                                       const EvictionSearchParams& params = {});

// Convenience wrapper that builds the ports.
EvictionSearchResult find_eviction_set(ModeController& system,
                                       LineAddress target, Sdid attacker,
                                       Sdid victim, const AttackBudget& budget,
                                       const EvictionSearchParams& params = {});

// Harness-side check: prime `set` (`passes` traversals), victim touches the
// target, probe `set` once. Returns the number of attacker misses observed.
uint64_t replay_eviction_set(AttackerPort& attacker, VictimPort& victim,
                             std::span<const LineAddress> set,
                             LineAddress target, uint32_t passes = 4);

ChannelReport eviction_set_report(const EvictionSearchResult& result,
                                  OperatingMode mode);

// ---- occupancy channel ------------------------------------------------------

struct OccupancyProbeParams {
  OperatingMode mode = OperatingMode::AvatarN;
  std::vector<uint64_t> footprints{0, 65536, 131072, 196608};
  uint32_t trials = 30;
  uint64_t attacker_lines = 131072;
  Sdid attacker = 0;
  Sdid victim = 1;
  ControllerConfig controller;
  EngineOptions engine;
};

// Engine options with the two domains on disjoint halves of the P ways.
EngineOptions two_domain_options(Sdid attacker, Sdid victim,
                                 uint32_t total_ways = 256);

// Fresh system per trial: attacker primes its lines, victim touches F random
// lines, attacker re-touches its lines and counts its own misses. statistic is
// the Pearson correlation of F and that count; success iff |r| > 0.5. Zero
// variance in either variable yields r = 0.
ChannelReport occupancy_probe(const OccupancyProbeParams& params,
                              const AttackBudget& budget);

double pearson(std::span<const double> x, std::span<const double> y);

// ---- mode-switch abuse ------------------------------------------------------

// Issues `attempts` switch requests `spacing` cycles apart, alternating the
// target mode. Success iff more than floor(elapsed / t_on_min) + 1 are
// accepted.
ChannelReport switch_dos_probe(ModeController& controller, uint64_t attempts,
                               uint64_t spacing_cycles = 0,
                               FlushStrategy strategy = FlushStrategy::Stall);

// Fills a fresh Avatar-N cache with a random dirty fraction per trial and
// measures the flush latency of a switch. statistic is the variance of the
// cycle counts; success (a latency channel exists) iff it is nonzero.
ChannelReport flush_timing_probe(FlushStrategy strategy, uint32_t trials,
                                 const ControllerConfig& controller,
                                 uint64_t seed);

}  // namespace avatar

#endif  // AVATAR_ATTACK_HPP_

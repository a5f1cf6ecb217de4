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


#ifndef AVATAR_SIMULATOR_HPP_
#define AVATAR_SIMULATOR_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "avatar/config.hpp"
#include "avatar/mode_controller.hpp"
#include "avatar/trace.hpp"
#include "json.hpp"

namespace avatar {

struct DomainMetrics {
  Sdid sdid = 0;
  DomainCounters counters;

  // Misses per thousand reads/writes.
  double mpka() const {
    return counters.accesses == 0
               ? 0.0
               : 1000.0 * static_cast<double>(counters.misses) /
                     static_cast<double>(counters.accesses);
  }
};

struct SimulationMetrics {
  uint64_t seed = 0;
  nlohmann::ordered_json config;

  uint64_t records = 0;
  uint64_t accesses = 0;  // reads + writes
  uint64_t hits = 0;
  uint64_t misses = 0;
  uint64_t flush_requests = 0;
  uint64_t replayed = 0;  // rejected while unstable, then retried
  std::vector<DomainMetrics> domains;  // only domains that issued requests

  uint64_t installs = 0;
  uint64_t sae_count = 0;
  uint64_t set_conflict_evictions = 0;
  uint64_t global_evictions = 0;
  uint64_t writebacks = 0;  // evictions only; flush writebacks are below

  std::vector<SwitchLogEntry> switches;
  uint64_t flush_cycles = 0;
  uint64_t flush_writebacks = 0;
  std::optional<double> dirty_fraction_at_flush;  // last accepted switch

  OperatingMode final_mode = OperatingMode::AvatarN;
  uint64_t cycles = 0;
  uint64_t stall_cycles = 0;
  uint64_t peak_valid = 0;
  uint64_t counter_audits = 0;

  // Avatar-R only, sampled after every access once the valid counter has
  // first reached the threshold.
  std::optional<double> avg_invalid_per_skew;
  uint64_t invalid_samples = 0;

  nlohmann::ordered_json to_json() const;
  std::string table() const;
};

// Pull-style record source. Returns nullopt at end of trace.
using RecordSource = std::function<std::optional<TraceRecord>()>;

// Reads the trace file or builds the generator named by `cfg`. Config and
// trace errors surface here, before any access is simulated.
RecordSource open_trace(const RunConfig& cfg);

// Throws InvariantViolation if an engine invariant breaks mid-run.
SimulationMetrics run(const RunConfig& cfg);
SimulationMetrics run(const RunConfig& cfg, RecordSource source);

}  // namespace avatar

#endif  // AVATAR_SIMULATOR_HPP_

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


#ifndef AVATAR_CONFIG_HPP_
#define AVATAR_CONFIG_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "avatar/avatar_cache.hpp"
#include "avatar/mode_controller.hpp"
#include "avatar/trace.hpp"
#include "json.hpp"

namespace avatar {

inline constexpr const char* kSeedEnvVar = "AVATAR_SEED";
inline constexpr uint64_t kFallbackSeed = 1;

// AVATAR_SEED if set (decimal or 0x-hex), else 1. Throws ConfigError on a
// malformed value.
uint64_t default_seed();

struct ScheduledSwitch {
  uint64_t at_record = 0;  // issued just before this trace record
  OperatingMode target = OperatingMode::AvatarN;
  FlushStrategy strategy = FlushStrategy::Stall;

  friend bool operator==(const ScheduledSwitch&,
                         const ScheduledSwitch&) = default;
};

struct TraceSource {
  std::optional<std::string> file;  // wins over the generator when set
  TraceKind kind = TraceKind::Uniform;
  TraceParams params;
};

// Everything a run depends on. Two runs with equal configs produce identical
// metrics.
struct RunConfig {
  OperatingMode mode = OperatingMode::AvatarN;
  uint64_t seed = kFallbackSeed;
  ControllerConfig controller;
  EngineOptions engine;
  FlushStrategy flush_strategy = FlushStrategy::Stall;
  TraceSource trace;
  std::vector<ScheduledSwitch> switches;
  // Compare the valid counter with a full scan every this many records
  // (0: only at the end).
  uint64_t audit_interval = 0;
  double installs_per_second = 1.6e9;
  std::optional<std::string> metrics_output;
};

// Starts from the defaults with the seed taken from default_seed().
RunConfig default_run_config();

// `key = value` lines; `#` starts a comment. Unknown keys, bad values and
// duplicate scalar keys raise ConfigError naming the line.
RunConfig parse_config(std::istream& in, RunConfig base = default_run_config());
RunConfig load_config(const std::string& path,
                      RunConfig base = default_run_config());

// Applies one setting. Also used for CLI overrides of the form key=value.
void apply_setting(RunConfig& cfg, std::string_view key,
                   std::string_view value);

// Keys accepted by apply_setting, in documentation order.
const std::vector<std::string>& config_keys();

// Cross-field checks (geometry, partitions, switch schedule).
void validate(const RunConfig& cfg);

nlohmann::ordered_json to_json(const RunConfig& cfg);

}  // namespace avatar

#endif  // AVATAR_CONFIG_HPP_

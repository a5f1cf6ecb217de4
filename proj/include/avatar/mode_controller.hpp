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

#ifndef AVATAR_MODE_CONTROLLER_HPP_
#define AVATAR_MODE_CONTROLLER_HPP_

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "avatar/avatar_cache.hpp"
#include "avatar/geometry.hpp"

namespace avatar {

enum class FlushStrategy : uint8_t { Stall, Bypass, Fixed };

std::string_view to_string(FlushStrategy strategy);
FlushStrategy parse_flush_strategy(std::string_view text);

struct FlushReport {
  FlushStrategy strategy = FlushStrategy::Stall;
  uint64_t lines_scanned = 0;
  uint64_t dirty_lines = 0;
  uint64_t cycles = 0;

  double dirty_fraction() const {
    return lines_scanned == 0 ? 0.0
                              : static_cast<double>(dirty_lines) /
                                    static_cast<double>(lines_scanned);
  }
};

// Linear flush-latency model: a tag scan limited by read ports plus one
// writeback per dirty line. Fixed writes back every line regardless of state.
struct FlushModel {
  uint32_t read_ports = 16;
  uint32_t writeback_cycles = 16;

  FlushReport compute(FlushStrategy strategy, uint64_t total_entries,
                      uint64_t dirty_lines) const;
};

struct ModeGeometries {
  CacheGeometry n = CacheGeometry::defaults(OperatingMode::AvatarN);
  CacheGeometry r = CacheGeometry::defaults(OperatingMode::AvatarR);
  CacheGeometry p = CacheGeometry::defaults(OperatingMode::AvatarP);

  const CacheGeometry& operator[](OperatingMode mode) const;
};

struct ControllerConfig {
  uint64_t t_on_min = 4'000'000'000;  // about one second at 4 GHz
  FlushModel flush;
  ModeGeometries geometries;
};

struct SwitchDecision {
  bool accepted = false;
  uint64_t remaining_cooldown = 0;
  std::optional<FlushReport> flush;
  uint64_t stable_at = 0;
};

struct SwitchLogEntry {
  uint64_t requested_at = 0;
  OperatingMode from = OperatingMode::AvatarN;
  OperatingMode to = OperatingMode::AvatarN;
  FlushStrategy strategy = FlushStrategy::Stall;
  bool accepted = false;
  uint64_t remaining_cooldown = 0;
  std::optional<FlushReport> flush;
};

// Owns the cache and the control register: current mode, stable bit, and the
// minimum dwell time between switches. Time is an explicit cycle counter that
// only moves forward.
class ModeController {
 public:
  ModeController(OperatingMode initial, ControllerConfig config,
                 EngineOptions engine_options, uint64_t seed);

  // Privileged. Rejected while the previous switch is younger than t_on_min;
  // the first switch after boot is always eligible.
  SwitchDecision request_switch(OperatingMode target, FlushStrategy strategy,
                                uint64_t now);

  bool poll_stable() const { return now_ >= stable_at_; }
  uint64_t stable_at() const { return stable_at_; }
  uint64_t now() const { return now_; }
  void advance_to(uint64_t cycle);

  // Stall/Fixed: RejectedUnstable while switching. Bypass: MissBypassed, no
  // fill. Otherwise forwarded to the cache.
  AccessResult access(const AccessRequest& req);

  OperatingMode mode() const { return cache_.mode(); }
  const AvatarCache& cache() const { return cache_; }
  AvatarCache& cache() { return cache_; }
  const ControllerConfig& config() const { return config_; }
  const std::vector<SwitchLogEntry>& switch_log() const { return log_; }
  uint64_t accepted_switches() const { return accepted_; }

 private:
  FlushReport flush(FlushStrategy strategy);

  ControllerConfig config_;
  AvatarCache cache_;
  uint64_t now_ = 0;
  uint64_t stable_at_ = 0;
  std::optional<uint64_t> last_switch_;
  FlushStrategy active_strategy_ = FlushStrategy::Stall;
  uint64_t accepted_ = 0;
  std::vector<SwitchLogEntry> log_;
};

}  // namespace avatar

#endif  // AVATAR_MODE_CONTROLLER_HPP_

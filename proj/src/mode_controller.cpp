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

#include "avatar/mode_controller.hpp"

#include <string>

namespace avatar {

std::string_view to_string(FlushStrategy strategy) {
  switch (strategy) {
    case FlushStrategy::Stall: return "stall";
    case FlushStrategy::Bypass: return "bypass";
    case FlushStrategy::Fixed: return "fixed";
  }
  return "unknown";
}

FlushStrategy parse_flush_strategy(std::string_view text) {
  if (text == "stall") return FlushStrategy::Stall;
  if (text == "bypass") return FlushStrategy::Bypass;
  if (text == "fixed") return FlushStrategy::Fixed;
  throw ConfigError("unknown flush strategy '" + std::string(text) + "'");
}

FlushReport FlushModel::compute(FlushStrategy strategy, uint64_t total_entries,
                                uint64_t dirty_lines) const {
  if (read_ports == 0) throw ConfigError("read_ports must be positive");
  FlushReport r;
  r.strategy = strategy;
  r.lines_scanned = total_entries;
  r.dirty_lines = dirty_lines;
  const uint64_t scan = (total_entries + read_ports - 1) / read_ports;
  const uint64_t written =
      strategy == FlushStrategy::Fixed ? total_entries : dirty_lines;
  r.cycles = scan + written * writeback_cycles;
  return r;
}

const CacheGeometry& ModeGeometries::operator[](OperatingMode mode) const {
  switch (mode) {
    case OperatingMode::AvatarN: return n;
    case OperatingMode::AvatarR: return r;
    case OperatingMode::AvatarP: return p;
  }
  throw ConfigError("unknown mode");
}

ModeController::ModeController(OperatingMode initial, ControllerConfig config,
                               EngineOptions engine_options, uint64_t seed)
    : config_(std::move(config)),
      cache_(config_.geometries[initial], std::move(engine_options), seed) {}

void ModeController::advance_to(uint64_t cycle) {
  if (cycle > now_) now_ = cycle;
}

FlushReport ModeController::flush(FlushStrategy strategy) {
  const InvalidationScan scan = cache_.invalidate_all();
  return config_.flush.compute(strategy, scan.lines_scanned, scan.dirty_lines);
}

SwitchDecision ModeController::request_switch(OperatingMode target,
                                              FlushStrategy strategy,
                                              uint64_t now) {
  advance_to(now);
  SwitchLogEntry entry;
  entry.requested_at = now_;
  entry.from = cache_.mode();
  entry.to = target;
  entry.strategy = strategy;

  SwitchDecision decision;
  if (last_switch_ && now_ - *last_switch_ < config_.t_on_min) {
    decision.remaining_cooldown = *last_switch_ + config_.t_on_min - now_;
    decision.stable_at = stable_at_;
    entry.remaining_cooldown = decision.remaining_cooldown;
    log_.push_back(entry);
    return decision;
  }

  // Accesses issued from here until the flush completes see stable = 0.
  const FlushReport report = flush(strategy);
  cache_.reconfigure(config_.geometries[target]);
  last_switch_ = now_;
  stable_at_ = now_ + report.cycles;
  active_strategy_ = strategy;
  ++accepted_;

  decision.accepted = true;
  decision.flush = report;
  decision.stable_at = stable_at_;
  entry.accepted = true;
  entry.flush = report;
  log_.push_back(entry);
  return decision;
}

AccessResult ModeController::access(const AccessRequest& req) {
  if (poll_stable()) return cache_.access(req);

  AccessResult result;
  if (active_strategy_ == FlushStrategy::Bypass && req.op != Op::Flush) {
    result.outcome = Outcome::MissBypassed;
    result.latency_cycles = cache_.options().latency.memory_cycles;
  } else {
    result.outcome = Outcome::RejectedUnstable;
  }
  cache_.record_unserviced(req.sdid, result.outcome);
  return result;
}

}  // namespace avatar

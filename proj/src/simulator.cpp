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


#include "avatar/simulator.hpp"

#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

namespace avatar {
namespace {

struct Seeds {
  uint64_t trace;
  uint64_t engine;
};

// Both streams hang off the one configured seed.
Seeds derive_seeds(uint64_t seed) {
  Rng root(seed);
  Seeds s{};
  s.trace = root.next();
  s.engine = root.next();
  return s;
}

nlohmann::ordered_json domain_json(const DomainMetrics& d) {
  const auto& c = d.counters;
  return {{"sdid", d.sdid},       {"accesses", c.accesses},
          {"hits", c.hits},       {"misses", c.misses},
          {"mpka", d.mpka()},     {"bypassed", c.bypassed},
          {"rejected", c.rejected}, {"flushes", c.flushes},
          {"flushed_lines", c.flushed_lines}, {"installs", c.installs},
          {"sae", c.sae},         {"lines_evicted", c.lines_evicted},
          {"writebacks", c.writebacks}};
}

nlohmann::ordered_json switch_json(const SwitchLogEntry& e) {
  nlohmann::ordered_json j{{"requested_at", e.requested_at},
                           {"from", std::string(to_string(e.from))},
                           {"to", std::string(to_string(e.to))},
                           {"strategy", std::string(to_string(e.strategy))},
                           {"accepted", e.accepted},
                           {"remaining_cooldown", e.remaining_cooldown}};
  if (e.flush) {
    j["flush"] = {{"lines_scanned", e.flush->lines_scanned},
                  {"dirty_lines", e.flush->dirty_lines},
                  {"dirty_fraction", e.flush->dirty_fraction()},
                  {"cycles", e.flush->cycles}};
  } else {
    j["flush"] = nullptr;
  }
  return j;
}

}  // namespace

RecordSource open_trace(const RunConfig& cfg) {
  if (cfg.trace.file) {
    std::ifstream in(*cfg.trace.file);
    if (!in) throw ConfigError("cannot open trace '" + *cfg.trace.file + "'");
    auto records =
        std::make_shared<std::vector<TraceRecord>>(parse_trace(in));
    return [records, i = size_t{0}]() mutable -> std::optional<TraceRecord> {
      if (i >= records->size()) return std::nullopt;
      return (*records)[i++];
    };
  }
  auto gen = std::make_shared<TraceGenerator>(cfg.trace.kind, cfg.trace.params,
                                              derive_seeds(cfg.seed).trace);
  return [gen] { return gen->next(); };
}

SimulationMetrics run(const RunConfig& cfg) {
  validate(cfg);
  return run(cfg, open_trace(cfg));
}

SimulationMetrics run(const RunConfig& cfg, RecordSource source) {
  validate(cfg);
  ModeController ctl(cfg.mode, cfg.controller, cfg.engine,
                     derive_seeds(cfg.seed).engine);

  SimulationMetrics m;
  m.seed = cfg.seed;
  m.config = to_json(cfg);

  std::vector<bool> active(cfg.engine.max_domains, false);
  size_t next_switch = 0;
  bool warm = false;
  double invalid_sum = 0.0;

  auto issue_switches = [&](uint64_t upto) {
    while (next_switch < cfg.switches.size() &&
           cfg.switches[next_switch].at_record <= upto) {
      const auto& s = cfg.switches[next_switch++];
      const auto d = ctl.request_switch(s.target, s.strategy, ctl.now());
      if (d.accepted) warm = false;
    }
  };

  while (auto rec = source()) {
    issue_switches(m.records);
    const AccessRequest req = rec->request();
    if (req.sdid >= active.size()) {
      throw ConfigError("sdid " + std::to_string(req.sdid) +
                        " exceeds max_domains");
    }
    active[req.sdid] = true;

    AccessResult res = ctl.access(req);
    if (res.outcome == Outcome::RejectedUnstable) {
      m.stall_cycles += ctl.stable_at() - ctl.now();
      ctl.advance_to(ctl.stable_at());
      ++m.replayed;
      res = ctl.access(req);
    }
    ctl.advance_to(ctl.now() + res.latency_cycles);
    ++m.records;

    const AvatarCache& cache = ctl.cache();
    if (res.outcome != Outcome::MissBypassed) {
      cache.audit_access(req.line(), res);
    }
    if (cfg.audit_interval != 0 && m.records % cfg.audit_interval == 0) {
      cache.audit_full();
      ++m.counter_audits;
    }
    m.peak_valid = std::max(m.peak_valid, cache.valid_count());
    if (cache.mode() == OperatingMode::AvatarR) {
      if (cache.valid_count() >= cache.threshold()) warm = true;
      if (warm) {
        const auto& g = cache.geometry();
        invalid_sum += static_cast<double>(g.total_entries() -
                                           cache.valid_count()) /
                       g.num_skews;
        ++m.invalid_samples;
      }
    }
  }
  issue_switches(UINT64_MAX);
  ctl.cache().audit_full();
  ++m.counter_audits;

  const EngineStats& st = ctl.cache().stats();
  for (Sdid d = 0; d < active.size(); ++d) {
    if (!active[d]) continue;
    const DomainCounters& c = st.domains[d];
    m.domains.push_back({d, c});
    m.accesses += c.accesses;
    m.hits += c.hits;
    m.misses += c.misses;
    m.flush_requests += c.flushes;
  }
  if (m.hits + m.misses != m.accesses) {
    throw InvariantViolation("hits + misses != accesses");
  }
  m.installs = st.installs;
  m.sae_count = st.sae_count;
  m.set_conflict_evictions = st.set_conflict_evictions;
  m.global_evictions = st.global_evictions;
  m.writebacks = st.writebacks;
  m.switches = ctl.switch_log();
  for (const auto& e : m.switches) {
    if (!e.flush) continue;
    m.flush_cycles += e.flush->cycles;
    m.flush_writebacks += e.flush->dirty_lines;
    m.dirty_fraction_at_flush = e.flush->dirty_fraction();
  }
  m.final_mode = ctl.mode();
  m.cycles = ctl.now();
  if (m.invalid_samples > 0) {
    m.avg_invalid_per_skew = invalid_sum / static_cast<double>(m.invalid_samples);
  }
  return m;
}

nlohmann::ordered_json SimulationMetrics::to_json() const {
  using nlohmann::ordered_json;
  ordered_json doms = ordered_json::array();
  for (const auto& d : domains) doms.push_back(domain_json(d));
  ordered_json log = ordered_json::array();
  for (const auto& e : switches) log.push_back(switch_json(e));
  auto opt = [](const std::optional<double>& v) {
    return v ? ordered_json(*v) : ordered_json(nullptr);
  };
  return {{"seed", seed},
          {"config", config},
          {"records", records},
          {"accesses", accesses},
          {"hits", hits},
          {"misses", misses},
          {"flush_requests", flush_requests},
          {"replayed", replayed},
          {"domains", doms},
          {"installs", installs},
          {"sae_count", sae_count},
          {"set_conflict_evictions", set_conflict_evictions},
          {"global_evictions", global_evictions},
          {"writebacks", writebacks},
          {"switches", log},
          {"flush_cycles", flush_cycles},
          {"flush_writebacks", flush_writebacks},
          {"dirty_fraction_at_flush", opt(dirty_fraction_at_flush)},
          {"final_mode", std::string(avatar::to_string(final_mode))},
          {"cycles", cycles},
          {"stall_cycles", stall_cycles},
          {"peak_valid", peak_valid},
          {"counter_audits", counter_audits},
          {"avg_invalid_per_skew", opt(avg_invalid_per_skew)},
          {"invalid_samples", invalid_samples}};
}

std::string SimulationMetrics::table() const {
  std::ostringstream out;
  out << "seed " << seed << ", final mode " << avatar::to_string(final_mode)
      << ", " << records << " records, " << cycles << " cycles\n";
  out << std::left << std::setw(6) << "sdid" << std::right << std::setw(12)
      << "accesses" << std::setw(12) << "hits" << std::setw(12) << "misses"
      << std::setw(10) << "mpka" << std::setw(10) << "sae" << std::setw(12)
      << "evicted" << std::setw(12) << "writebacks" << '\n';
  for (const auto& d : domains) {
    const auto& c = d.counters;
    out << std::left << std::setw(6) << d.sdid << std::right << std::setw(12)
        << c.accesses << std::setw(12) << c.hits << std::setw(12) << c.misses
        << std::setw(10) << std::fixed << std::setprecision(2) << d.mpka()
        << std::setw(10) << c.sae << std::setw(12) << c.lines_evicted
        << std::setw(12) << c.writebacks << '\n';
  }
  out << "installs " << installs << ", sae " << sae_count
      << ", set-conflict evictions " << set_conflict_evictions
      << ", global evictions " << global_evictions << ", writebacks "
      << writebacks << '\n';
  for (const auto& e : switches) {
    out << "switch @" << e.requested_at << ' ' << avatar::to_string(e.from)
        << " -> " << avatar::to_string(e.to) << " ("
        << avatar::to_string(e.strategy) << "): ";
    if (e.accepted) {
      out << "accepted, " << e.flush->cycles << " flush cycles, dirty "
          << std::setprecision(4) << e.flush->dirty_fraction() << '\n';
    } else {
      out << "rejected, cooldown " << e.remaining_cooldown << '\n';
    }
  }
  if (avg_invalid_per_skew) {
    out << "avg invalid entries per skew " << std::setprecision(1)
        << *avg_invalid_per_skew << " over " << invalid_samples
        << " samples\n";
  }
  return out.str();
}

}  // namespace avatar

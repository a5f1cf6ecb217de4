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


#include "avatar/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "avatar/address_randomizer.hpp"

namespace avatar {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  throw ConfigError("bad value '" + std::string(value) + "' for " +
                    std::string(key));
}

// Decimal, 0x-hex, or an exact integer in scientific notation ("4e9").
uint64_t to_u64(std::string_view key, std::string_view v) {
  uint64_t out = 0;
  const char* end = v.data() + v.size();
  if (v.size() > 2 && v[0] == '0' && (v[1] == 'x' || v[1] == 'X')) {
    auto [p, ec] = std::from_chars(v.data() + 2, end, out, 16);
    if (ec == std::errc() && p == end) return out;
    bad_value(key, v);
  }
  if (auto [p, ec] = std::from_chars(v.data(), end, out, 10);
      ec == std::errc() && p == end) {
    return out;
  }
  double d = 0;
  auto [p, ec] = std::from_chars(v.data(), end, d);
  if (ec != std::errc() || p != end || d < 0 || d >= 0x1.0p64 ||
      std::floor(d) != d) {
    bad_value(key, v);
  }
  return static_cast<uint64_t>(d);
}

uint32_t to_u32(std::string_view key, std::string_view v) {
  const uint64_t x = to_u64(key, v);
  if (x > UINT32_MAX) bad_value(key, v);
  return static_cast<uint32_t>(x);
}

double to_double(std::string_view key, std::string_view v) {
  double d = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), d);
  if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(d)) {
    bad_value(key, v);
  }
  return d;
}

Sdid to_sdid(std::string_view key, std::string_view v) {
  const uint64_t x = to_u64(key, v);
  if (x > kTraceMaxSdid) bad_value(key, v);
  return static_cast<Sdid>(x);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

void retag(CacheGeometry& g) {
  g.tag_bits = is_power_of_two(g.num_sets)
                   ? LineAddress::kBits - log2_exact(g.num_sets)
                   : 0;
}

// "<record>:<mode>[:<strategy>]"
ScheduledSwitch parse_switch(std::string_view v, FlushStrategy fallback) {
  const auto parts = split(v, ':');
  if (parts.size() < 2 || parts.size() > 3) bad_value("switch", v);
  ScheduledSwitch s;
  s.at_record = to_u64("switch", parts[0]);
  s.target = parse_mode(parts[1]);
  s.strategy = parts.size() == 3 ? parse_flush_strategy(parts[2]) : fallback;
  return s;
}

const std::set<std::string_view> kRepeatable = {"switch"};

}  // namespace

uint64_t default_seed() {
  const char* env = std::getenv(kSeedEnvVar);
  if (env == nullptr || *env == '\0') return kFallbackSeed;
  return to_u64(kSeedEnvVar, trim(env));
}

RunConfig default_run_config() {
  RunConfig cfg;
  cfg.seed = default_seed();
  return cfg;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "mode", "seed", "flush_strategy", "t_on_cycles", "read_ports",
      "writeback_cycles", "hit_cycles", "memory_cycles", "cipher_cycles",
      "n_sets", "n_ways", "r_sets", "r_ways", "r_invalid_ways", "p_sets",
      "p_ways", "partitions", "max_domains", "sdid_matching",
      "eviction_rejection_limit", "trace_file", "trace_kind", "trace_length",
      "trace_footprint", "trace_base", "trace_write_fraction",
      "trace_flush_fraction", "trace_domains", "trace_conflict_set",
      "trace_conflict_index_bits", "trace_attacker", "trace_victim",
      "trace_attacker_lines", "trace_victim_lines", "switch",
      "audit_interval", "installs_per_second", "metrics_output"};
  return keys;
}

void apply_setting(RunConfig& cfg, std::string_view key,
                   std::string_view value) {
  key = trim(key);
  value = trim(value);
  auto& geo = cfg.controller.geometries;
  auto& tp = cfg.trace.params;

  if (key == "mode") {
    cfg.mode = parse_mode(value);
  } else if (key == "seed") {
    cfg.seed = to_u64(key, value);
  } else if (key == "flush_strategy") {
    cfg.flush_strategy = parse_flush_strategy(value);
  } else if (key == "t_on_cycles") {
    cfg.controller.t_on_min = to_u64(key, value);
  } else if (key == "read_ports") {
    cfg.controller.flush.read_ports = to_u32(key, value);
  } else if (key == "writeback_cycles") {
    cfg.controller.flush.writeback_cycles = to_u32(key, value);
  } else if (key == "hit_cycles") {
    cfg.engine.latency.hit_cycles = to_u32(key, value);
  } else if (key == "memory_cycles") {
    cfg.engine.latency.memory_cycles = to_u32(key, value);
  } else if (key == "cipher_cycles") {
    cfg.engine.latency.cipher_cycles = to_u32(key, value);
  } else if (key == "n_sets") {
    geo.n.num_sets = to_u32(key, value);
    retag(geo.n);
  } else if (key == "n_ways") {
    geo.n.ways_per_set = to_u32(key, value);
  } else if (key == "r_sets") {
    geo.r.num_sets = to_u32(key, value);
    retag(geo.r);
  } else if (key == "r_ways") {
    geo.r.ways_per_set = to_u32(key, value);
  } else if (key == "r_invalid_ways") {
    geo.r.invalid_ways_per_skew = to_u32(key, value);
  } else if (key == "p_sets") {
    geo.p.num_sets = to_u32(key, value);
    retag(geo.p);
  } else if (key == "p_ways") {
    geo.p.ways_per_set = to_u32(key, value);
  } else if (key == "partitions") {
    cfg.engine.partitions = PartitionMap::parse(value);
  } else if (key == "max_domains") {
    const uint64_t m = to_u64(key, value);
    if (m == 0 || m > 256) bad_value(key, value);
    cfg.engine.max_domains = static_cast<Sdid>(m);
  } else if (key == "sdid_matching") {
    if (value == "auto") {
      cfg.engine.match_sdid.reset();
    } else if (value == "on") {
      cfg.engine.match_sdid = true;
    } else if (value == "off") {
      cfg.engine.match_sdid = false;
    } else {
      bad_value(key, value);
    }
  } else if (key == "eviction_rejection_limit") {
    cfg.engine.eviction_rejection_limit = to_u32(key, value);
  } else if (key == "trace_file") {
    if (value.empty()) {
      cfg.trace.file.reset();
    } else {
      cfg.trace.file = std::string(value);
    }
  } else if (key == "trace_kind") {
    cfg.trace.kind = parse_trace_kind(value);
  } else if (key == "trace_length") {
    tp.length = to_u64(key, value);
  } else if (key == "trace_footprint") {
    tp.footprint_lines = to_u64(key, value);
  } else if (key == "trace_base") {
    tp.base_line = to_u64(key, value);
  } else if (key == "trace_write_fraction") {
    tp.write_fraction = to_double(key, value);
  } else if (key == "trace_flush_fraction") {
    tp.flush_fraction = to_double(key, value);
  } else if (key == "trace_domains") {
    tp.domains.clear();
    for (auto item : split(value, ',')) tp.domains.push_back(to_sdid(key, item));
  } else if (key == "trace_conflict_set") {
    tp.conflict_set = to_u32(key, value);
  } else if (key == "trace_conflict_index_bits") {
    tp.conflict_index_bits = to_u32(key, value);
  } else if (key == "trace_attacker") {
    tp.attacker = to_sdid(key, value);
  } else if (key == "trace_victim") {
    tp.victim = to_sdid(key, value);
  } else if (key == "trace_attacker_lines") {
    tp.attacker_lines = to_u64(key, value);
  } else if (key == "trace_victim_lines") {
    tp.victim_lines = to_u64(key, value);
  } else if (key == "switch") {
    cfg.switches.push_back(parse_switch(value, cfg.flush_strategy));
  } else if (key == "audit_interval") {
    cfg.audit_interval = to_u64(key, value);
  } else if (key == "installs_per_second") {
    cfg.installs_per_second = to_double(key, value);
    if (cfg.installs_per_second <= 0) bad_value(key, value);
  } else if (key == "metrics_output") {
    if (value.empty()) {
      cfg.metrics_output.reset();
    } else {
      cfg.metrics_output = std::string(value);
    }
  } else {
    throw ConfigError("unknown config key '" + std::string(key) + "'");
  }
}

RunConfig parse_config(std::istream& in, RunConfig base) {
  std::string raw;
  uint64_t line_no = 0;
  std::set<std::string> seen;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    try {
      if (eq == std::string_view::npos) {
        throw ConfigError("expected `key = value`");
      }
      const std::string key(trim(line.substr(0, eq)));
      if (!kRepeatable.contains(key) && !seen.insert(key).second) {
        throw ConfigError("duplicate key '" + key + "'");
      }
      apply_setting(base, key, line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(std::string(e.what()) + " at line " +
                        std::to_string(line_no));
    }
  }
  return base;
}

RunConfig load_config(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in, std::move(base));
}

void validate(const RunConfig& cfg) {
  const auto& g = cfg.controller.geometries;
  g.n.validate();
  g.r.validate();
  g.p.validate();
  if (g.n.mode != OperatingMode::AvatarN || g.r.mode != OperatingMode::AvatarR ||
      g.p.mode != OperatingMode::AvatarP) {
    throw ConfigError("geometry assigned to the wrong mode");
  }
  cfg.engine.partitions.validate(g.p.ways_per_set);
  if (cfg.engine.partitions.domains() > cfg.engine.max_domains) {
    throw ConfigError("partition map names more domains than max_domains");
  }
  if (cfg.controller.flush.read_ports == 0) {
    throw ConfigError("read_ports must be positive");
  }
  for (size_t i = 1; i < cfg.switches.size(); ++i) {
    if (cfg.switches[i].at_record < cfg.switches[i - 1].at_record) {
      throw ConfigError("switch schedule must be in record order");
    }
  }
  if (cfg.trace.file) return;
  // Throws on bad generator parameters.
  TraceGenerator probe(cfg.trace.kind, cfg.trace.params, 0);
}

nlohmann::ordered_json to_json(const RunConfig& cfg) {
  using nlohmann::ordered_json;
  auto geometry = [](const CacheGeometry& g) {
    return ordered_json{{"sets", g.num_sets},
                        {"ways", g.ways_per_set},
                        {"skews", g.num_skews},
                        {"invalid_ways_per_skew", g.invalid_ways_per_skew},
                        {"tag_bits", g.tag_bits}};
  };
  const auto& tp = cfg.trace.params;
  ordered_json trace;
  if (cfg.trace.file) {
    trace["file"] = *cfg.trace.file;
  } else {
    trace["kind"] = std::string(to_string(cfg.trace.kind));
    trace["length"] = tp.length;
    trace["footprint_lines"] = tp.footprint_lines;
    trace["base_line"] = tp.base_line;
    trace["write_fraction"] = tp.write_fraction;
    trace["flush_fraction"] = tp.flush_fraction;
    trace["domains"] = tp.domains;
    if (cfg.trace.kind == TraceKind::ConflictSet) {
      trace["conflict_set"] = tp.conflict_set;
      trace["conflict_index_bits"] = tp.conflict_index_bits;
    }
    if (cfg.trace.kind == TraceKind::OccupancyPhase) {
      trace["attacker"] = tp.attacker;
      trace["victim"] = tp.victim;
      trace["attacker_lines"] = tp.attacker_lines;
      trace["victim_lines"] = tp.victim_lines;
    }
  }
  ordered_json switches = ordered_json::array();
  for (const auto& s : cfg.switches) {
    switches.push_back({{"at_record", s.at_record},
                        {"target", std::string(to_string(s.target))},
                        {"strategy", std::string(to_string(s.strategy))}});
  }
  const auto& g = cfg.controller.geometries;
  ordered_json sdid = cfg.engine.match_sdid
                          ? ordered_json(*cfg.engine.match_sdid ? "on" : "off")
                          : ordered_json("auto");
  return ordered_json{
      {"mode", std::string(to_string(cfg.mode))},
      {"seed", cfg.seed},
      {"flush_strategy", std::string(to_string(cfg.flush_strategy))},
      {"t_on_cycles", cfg.controller.t_on_min},
      {"read_ports", cfg.controller.flush.read_ports},
      {"writeback_cycles", cfg.controller.flush.writeback_cycles},
      {"latency",
       {{"hit_cycles", cfg.engine.latency.hit_cycles},
        {"memory_cycles", cfg.engine.latency.memory_cycles},
        {"cipher_cycles", cfg.engine.latency.cipher_cycles}}},
      {"geometry",
       {{"avatar-n", geometry(g.n)},
        {"avatar-r", geometry(g.r)},
        {"avatar-p", geometry(g.p)}}},
      {"partitions", cfg.engine.partitions.to_string()},
      {"max_domains", cfg.engine.max_domains},
      {"sdid_matching", sdid},
      {"eviction_rejection_limit", cfg.engine.eviction_rejection_limit},
      {"trace", trace},
      {"switches", switches},
      {"audit_interval", cfg.audit_interval},
      {"installs_per_second", cfg.installs_per_second},
  };
}

}  // namespace avatar

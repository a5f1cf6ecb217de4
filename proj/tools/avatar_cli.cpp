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


// Command-line front end: simulate, switch-demo, security-model, attack.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "avatar/attack.hpp"
#include "avatar/config.hpp"
#include "avatar/security_model.hpp"
#include "avatar/simulator.hpp"
#include "json.hpp"

namespace {

using namespace avatar;
using nlohmann::ordered_json;

constexpr int kExitOther = 1;
constexpr int kExitConfig = 2;
constexpr int kExitInvariant = 3;

// Lets integer options take exact scientific notation such as 1e9.
const CLI::Validator kCount(
    [](std::string& v) -> std::string {
      if (v.find_first_of("eE") == std::string::npos ||
          v.rfind("0x", 0) == 0 || v.rfind("0X", 0) == 0) {
        return {};
      }
      char* end = nullptr;
      const double d = std::strtod(v.c_str(), &end);
      if (*end != '\0' || d < 0 || d >= 0x1.0p64 || std::floor(d) != d) {
        return "not a whole number: " + v;
      }
      v = std::to_string(static_cast<uint64_t>(d));
      return {};
    },
    "COUNT");

std::string sci(const Real& x, int digits = 6) {
  return x.str(digits, std::ios_base::scientific);
}

double log10_of(const Real& x) {
  return x > 0 ? static_cast<double>(boost::multiprecision::log10(x))
               : -std::numeric_limits<double>::infinity();
}

void emit_json(const ordered_json& j, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

// ---- simulate ---------------------------------------------------------------

struct SimulateArgs {
  std::string config;
  std::vector<std::string> sets;
  std::string metrics;
  bool json = false;
};

int cmd_simulate(const SimulateArgs& a) {
  RunConfig cfg = a.config.empty() ? default_run_config()
                                   : load_config(a.config);
  for (const auto& kv : a.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("--set expects key=value, got '" + kv + "'");
    }
    apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!a.metrics.empty()) cfg.metrics_output = a.metrics;

  const SimulationMetrics m = run(cfg);
  if (cfg.metrics_output) emit_json(m.to_json(), *cfg.metrics_output);
  if (a.json) {
    std::cout << m.to_json().dump(2) << '\n';
  } else {
    std::cout << m.table();
  }
  return 0;
}

// ---- switch-demo ------------------------------------------------------------

struct SwitchDemoArgs {
  std::string from = "avatar-n";
  std::string to = "avatar-r";
  std::string strategy = "stall";
  double dirty_fraction = 0.29;
  uint64_t seed = 0;
  uint64_t t_on = 4'000'000'000;
  std::string output;
};

int cmd_switch_demo(const SwitchDemoArgs& a) {
  ControllerConfig cc;
  cc.t_on_min = a.t_on;
  const OperatingMode from = parse_mode(a.from);
  const OperatingMode to = parse_mode(a.to);
  const FlushStrategy strategy = parse_flush_strategy(a.strategy);
  if (a.dirty_fraction < 0 || a.dirty_fraction > 1) {
    throw ConfigError("dirty fraction must lie in [0, 1]");
  }
  EngineOptions eo;
  ModeController ctl(from, cc, eo, a.seed);
  Rng rng(a.seed);

  // Fill every entry, a given fraction of them dirty.
  const uint64_t lines = cc.geometries[from].total_entries();
  for (uint64_t l = 0; l < lines; ++l) {
    const Op op = rng.uniform() < a.dirty_fraction ? Op::Write : Op::Read;
    ctl.access({0, op, LineAddress(l).physical()});
    ctl.advance_to(ctl.now() + 1);
  }
  const uint64_t valid = ctl.cache().valid_count();
  const uint64_t dirty = ctl.cache().dirty_lines();

  const auto first = ctl.request_switch(to, strategy, ctl.now());
  const auto probe = ctl.access({0, Op::Read, 0});
  const auto second = ctl.request_switch(from, strategy, ctl.now() + 1);
  const auto third =
      ctl.request_switch(from, strategy, ctl.now() + second.remaining_cooldown);

  ordered_json j{
      {"seed", a.seed},
      {"from", std::string(to_string(from))},
      {"to", std::string(to_string(to))},
      {"strategy", std::string(to_string(strategy))},
      {"t_on_cycles", cc.t_on_min},
      {"read_ports", cc.flush.read_ports},
      {"writeback_cycles", cc.flush.writeback_cycles},
      {"valid_before", valid},
      {"dirty_before", dirty},
      {"first_switch",
       {{"accepted", first.accepted},
        {"flush_cycles", first.flush ? first.flush->cycles : 0},
        {"dirty_fraction", first.flush ? first.flush->dirty_fraction() : 0.0},
        {"stable_at", first.stable_at}}},
      {"access_during_flush", std::string(to_string(probe.outcome))},
      {"immediate_switch_back",
       {{"accepted", second.accepted},
        {"remaining_cooldown", second.remaining_cooldown}}},
      {"switch_back_after_cooldown", {{"accepted", third.accepted}}},
  };
  emit_json(j, a.output);
  return 0;
}

// ---- security-model ---------------------------------------------------------

struct SecurityArgs {
  std::string format = "csv";
  std::string output;
  // analytic
  uint32_t valid_ways = 121;
  uint32_t anchor_n = 88;
  std::string anchor = "3.76e-13";
  bool normalize = false;
  uint32_t max_n = 140;
  std::vector<uint32_t> thresholds{126, 127, 128};
  // mc
  uint32_t buckets = 1024;
  uint32_t spill_ways = 128;
  uint64_t throws = 10'000'000;
  uint64_t seed = 0;
  unsigned workers = 0;
  // sweep
  std::vector<uint32_t> ways{64, 128, 256};
  std::vector<uint32_t> invalid{7};
  double rate = kDefaultInstallsPerSecond;
};

void write_table(const SecurityArgs& a, const ordered_json& rows,
                 const ordered_json& summary) {
  if (a.format == "json") {
    emit_json({{"rows", rows}, {"summary", summary}}, a.output);
    return;
  }
  std::ostringstream out;
  if (!rows.empty()) {
    bool first = true;
    for (const auto& [k, v] : rows.front().items()) {
      out << (first ? "" : ",") << k;
      first = false;
    }
    out << '\n';
    for (const auto& r : rows) {
      first = true;
      for (const auto& [k, v] : r.items()) {
        out << (first ? "" : ",")
            << (v.is_string() ? v.get<std::string>() : v.dump());
        first = false;
      }
      out << '\n';
    }
  }
  for (const auto& [k, v] : summary.items()) {
    out << "# " << k << " = "
        << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
  }
  if (a.output.empty() || a.output == "-") {
    std::cout << out.str();
  } else {
    std::ofstream f(a.output);
    if (!f) throw ConfigError("cannot write '" + a.output + "'");
    f << out.str();
  }
}

int cmd_analytic(const SecurityArgs& a) {
  const Real anchor = a.normalize
                          ? normalized_anchor(a.anchor_n, a.valid_ways, a.max_n)
                          : Real(a.anchor);
  const auto dist = analytic_tail(a.anchor_n, anchor, a.valid_ways, a.max_n);
  ordered_json rows = ordered_json::array();
  for (const auto& [n, p] : dist.pr) {
    rows.push_back({{"n", n}, {"pr", sci(p)}, {"log10_pr", log10_of(p)}});
  }
  ordered_json spill = ordered_json::array();
  for (uint32_t w : a.thresholds) {
    const Real ips = installs_per_sae(dist, w);
    spill.push_back({{"threshold_ways", w},
                     {"installs_per_sae", sci(ips, 3)},
                     {"years", sci(installs_to_years(ips, a.rate), 3)}});
  }
  write_table(a, rows,
              {{"valid_ways", a.valid_ways},
               {"anchor_n", a.anchor_n},
               {"anchor_pr", sci(anchor)},
               {"total_mass", sci(dist.total(), 8)},
               {"spill", spill.dump()}});
  return 0;
}

int cmd_mc(const SecurityArgs& a) {
  BallsConfig bc;
  bc.buckets_per_skew = a.buckets;
  bc.valid_ways_per_skew = a.valid_ways;
  bc.spill_threshold_ways = a.spill_ways;
  bc.throws = a.throws;
  bc.seed = a.seed;
  const unsigned workers =
      a.workers != 0 ? a.workers : std::max(1u, std::thread::hardware_concurrency());
  const MonteCarloResult r = mc_simulate_parallel(bc, workers);
  ordered_json rows = ordered_json::array();
  for (uint32_t n = r.min_occupancy; n <= r.max_occupancy; ++n) {
    const Real p = r.distribution.at(n);
    rows.push_back({{"n", n},
                    {"pr", sci(p)},
                    {"log10_pr", log10_of(p)},
                    {"visits", n < r.visits.size() ? r.visits[n] : 0}});
  }
  write_table(a, rows,
              {{"seed", a.seed},
               {"buckets", r.buckets},
               {"balls", r.total_balls},
               {"throws", r.throws},
               {"spills", r.spills},
               {"spill_rate", r.spill_rate()},
               {"min_occupancy", r.min_occupancy},
               {"max_occupancy", r.max_occupancy}});
  return 0;
}

int cmd_sweep(const SecurityArgs& a) {
  ordered_json rows = ordered_json::array();
  for (uint32_t w : a.ways) {
    for (uint32_t inv : a.invalid) {
      const SweepPoint p = sweep_point(w, inv, a.rate);
      rows.push_back({{"ways_per_skew", p.ways_per_skew},
                      {"invalid_ways", p.invalid_ways},
                      {"valid_ways", p.valid_ways},
                      {"anchor_n", p.anchor_n},
                      {"anchor_pr", sci(p.anchor_pr, 4)},
                      {"installs_per_sae", sci(p.installs_per_sae, 3)},
                      {"years", sci(p.years, 3)}});
    }
  }
  write_table(a, rows, {{"installs_per_second", a.rate}});
  return 0;
}

// ---- attack -----------------------------------------------------------------

struct AttackArgs {
  std::string kind = "eviction-set";
  std::string mode = "avatar-n";
  uint64_t budget = 100'000'000;
  uint64_t seed = 0;
  uint64_t target = 0x12345;
  uint32_t trials = 30;
  uint64_t attempts = 100;
  uint64_t spacing = 0;
  uint64_t t_on = 4'000'000'000;
  std::string strategy = "stall";
  std::string output;
};

int cmd_attack(const AttackArgs& a) {
  const OperatingMode mode = parse_mode(a.mode);
  AttackBudget budget;
  budget.max_accesses = a.budget;
  budget.rng_seed = a.seed;
  ControllerConfig cc;
  cc.t_on_min = a.t_on;
  ChannelReport rep;
  if (a.kind == "eviction-set") {
    ModeController sys(mode, cc, two_domain_options(0, 1), a.seed);
    rep = eviction_set_report(
        find_eviction_set(sys, LineAddress(a.target), 0, 1, budget), mode);
  } else if (a.kind == "occupancy") {
    OccupancyProbeParams p;
    p.mode = mode;
    p.trials = a.trials;
    p.controller = cc;
    p.engine = two_domain_options(p.attacker, p.victim);
    rep = occupancy_probe(p, budget);
  } else if (a.kind == "switch-dos") {
    ModeController sys(mode, cc, EngineOptions{}, a.seed);
    rep = switch_dos_probe(sys, a.attempts, a.spacing,
                           parse_flush_strategy(a.strategy));
  } else if (a.kind == "flush-timing") {
    rep = flush_timing_probe(parse_flush_strategy(a.strategy), a.trials, cc,
                             a.seed);
  } else {
    throw ConfigError("unknown attack '" + a.kind + "'");
  }
  ordered_json j = to_json(rep);
  j["seed"] = a.seed;
  emit_json(j, a.output);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Morphable LLC simulator: Avatar-N / Avatar-R / Avatar-P"};
  app.require_subcommand(1);
  const uint64_t env_seed = [] {
    try {
      return default_seed();
    } catch (const ConfigError& e) {
      std::cerr << "error: " << e.what() << '\n';
      std::exit(kExitConfig);
    }
  }();

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Replay a trace and report metrics");
  s->add_option("-c,--config", sim.config, "key = value config file");
  s->add_option("-s,--set", sim.sets, "Override a config key (key=value)");
  s->add_option("-m,--metrics", sim.metrics, "Write metrics JSON here");
  s->add_flag("--json", sim.json, "Print JSON instead of the table");

  SwitchDemoArgs sw;
  sw.seed = env_seed;
  auto* d = app.add_subcommand("switch-demo",
                               "Fill the cache, switch modes, report flush cost");
  d->add_option("--from", sw.from, "Starting mode")->capture_default_str();
  d->add_option("--to", sw.to, "Target mode")->capture_default_str();
  d->add_option("--strategy", sw.strategy, "stall | bypass | fixed")
      ->capture_default_str();
  d->add_option("--dirty-fraction", sw.dirty_fraction)->capture_default_str();
  d->add_option("--seed", sw.seed)->capture_default_str();
  d->add_option("--t-on", sw.t_on, "Minimum cycles between switches")
      ->transform(kCount)
      ->capture_default_str();
  d->add_option("-o,--output", sw.output, "JSON output path (default stdout)");

  SecurityArgs sec;
  sec.seed = env_seed;
  auto* m = app.add_subcommand("security-model",
                               "Spill-probability model of the randomized mode");
  m->require_subcommand(1);
  auto common = [&sec](CLI::App* c) {
    c->add_option("--format", sec.format, "csv | json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    c->add_option("-o,--output", sec.output, "Output path (default stdout)");
    c->add_option("--rate", sec.rate, "Installs per second")
        ->capture_default_str();
  };
  auto* an = m->add_subcommand("analytic", "Tail recurrence from an anchor");
  common(an);
  an->add_option("--valid-ways", sec.valid_ways)->capture_default_str();
  an->add_option("--anchor-n", sec.anchor_n)->capture_default_str();
  an->add_option("--anchor", sec.anchor, "Pr(n = anchor-n)")
      ->capture_default_str();
  an->add_flag("--normalize", sec.normalize,
               "Choose the anchor so the distribution sums to one");
  an->add_option("--max-n", sec.max_n)->capture_default_str();
  an->add_option("--thresholds", sec.thresholds, "Spill thresholds (ways)")
      ->delimiter(',');
  auto* mc = m->add_subcommand("mc", "Bucket-and-balls Monte Carlo");
  common(mc);
  mc->add_option("--buckets", sec.buckets, "Buckets per skew")
      ->capture_default_str();
  mc->add_option("--valid-ways", sec.valid_ways)->capture_default_str();
  mc->add_option("--spill-ways", sec.spill_ways)->capture_default_str();
  mc->add_option("--throws", sec.throws)
      ->transform(kCount)->capture_default_str();
  mc->add_option("--seed", sec.seed)->capture_default_str();
  mc->add_option("--workers", sec.workers, "0 = hardware threads");
  auto* sweep = m->add_subcommand("sweep", "Installs per SAE across geometries");
  common(sweep);
  sweep->add_option("--ways", sec.ways, "Ways per skew")->delimiter(',');
  sweep->add_option("--invalid", sec.invalid, "Invalid ways per skew")
      ->delimiter(',');

  AttackArgs atk;
  atk.seed = env_seed;
  auto* at = app.add_subcommand("attack", "Run one attack against a mode");
  at->add_option("--kind", atk.kind)
      ->check(CLI::IsMember(
          {"eviction-set", "occupancy", "switch-dos", "flush-timing"}))
      ->capture_default_str();
  at->add_option("--mode", atk.mode)->capture_default_str();
  at->add_option("--budget", atk.budget, "Attacker access budget")
      ->transform(kCount)
      ->capture_default_str();
  at->add_option("--seed", atk.seed)->capture_default_str();
  at->add_option("--target", atk.target, "Target line address")
      ->capture_default_str();
  at->add_option("--trials", atk.trials)
      ->transform(kCount)->capture_default_str();
  at->add_option("--attempts", atk.attempts)
      ->transform(kCount)->capture_default_str();
  at->add_option("--spacing", atk.spacing, "Cycles between switch requests")
      ->transform(kCount)
      ->capture_default_str();
  at->add_option("--t-on", atk.t_on)
      ->transform(kCount)->capture_default_str();
  at->add_option("--strategy", atk.strategy)->capture_default_str();
  at->add_option("-o,--output", atk.output, "JSON output path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (s->parsed()) return cmd_simulate(sim);
    if (d->parsed()) return cmd_switch_demo(sw);
    if (an->parsed()) return cmd_analytic(sec);
    if (mc->parsed()) return cmd_mc(sec);
    if (sweep->parsed()) return cmd_sweep(sec);
    if (at->parsed()) return cmd_attack(atk);
  } catch (const InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const TraceParseError& e) {
    std::cerr << "trace error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitOther;
  }
  return 0;
}

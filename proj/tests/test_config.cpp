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


#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

#include "avatar/config.hpp"

namespace avatar {
namespace {

RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  RunConfig base;
  return parse_config(in, base);
}

class SeedEnv : public ::testing::Test {
 protected:
  void SetUp() override {
    if (const char* v = std::getenv(kSeedEnvVar)) saved_ = v;
  }
  void TearDown() override {
    if (saved_) {
      setenv(kSeedEnvVar, saved_->c_str(), 1);
    } else {
      unsetenv(kSeedEnvVar);
    }
  }
  std::optional<std::string> saved_;
};

TEST_F(SeedEnv, DefaultSeedComesFromTheEnvironment) {
  unsetenv(kSeedEnvVar);
  EXPECT_EQ(default_seed(), kFallbackSeed);
  setenv(kSeedEnvVar, "1234", 1);
  EXPECT_EQ(default_seed(), 1234u);
  EXPECT_EQ(default_run_config().seed, 1234u);
  setenv(kSeedEnvVar, "0x10", 1);
  EXPECT_EQ(default_seed(), 16u);
  setenv(kSeedEnvVar, "banana", 1);
  EXPECT_THROW(default_seed(), ConfigError);
}

TEST(Config, DefaultsMatchTheReferenceMachine) {
  const auto j = to_json(RunConfig{});
  EXPECT_EQ(j["mode"], "avatar-n");
  EXPECT_EQ(j["read_ports"], 16);
  EXPECT_EQ(j["writeback_cycles"], 16);
  EXPECT_EQ(j["t_on_cycles"], 4000000000ull);
  EXPECT_EQ(j["installs_per_second"], 1.6e9);
  EXPECT_EQ(j["flush_strategy"], "stall");
  EXPECT_EQ(j["sdid_matching"], "auto");
  EXPECT_EQ(j["latency"]["hit_cycles"], 20);
  EXPECT_EQ(j["latency"]["memory_cycles"], 200);
  EXPECT_EQ(j["latency"]["cipher_cycles"], 4);
  EXPECT_EQ(j["geometry"]["avatar-n"]["sets"], 16384);
  EXPECT_EQ(j["geometry"]["avatar-n"]["ways"], 16);
  EXPECT_EQ(j["geometry"]["avatar-r"]["sets"], 1024);
  EXPECT_EQ(j["geometry"]["avatar-r"]["ways"], 128);
  EXPECT_EQ(j["geometry"]["avatar-r"]["skews"], 2);
  EXPECT_EQ(j["geometry"]["avatar-r"]["invalid_ways_per_skew"], 7);
  EXPECT_EQ(j["geometry"]["avatar-p"]["ways"], 256);
  EXPECT_NO_THROW(validate(RunConfig{}));
}

TEST(Config, ParsesKeysCommentsAndNumbers) {
  const auto c = parse(
      "# comment\n"
      "mode = avatar-r\n"
      "seed = 0x2a   # trailing\n"
      "\n"
      "t_on_cycles = 4e9\n"
      "flush_strategy = bypass\n"
      "trace_kind = conflict-set\n"
      "trace_length = 1e3\n"
      "trace_domains = 0, 2,5\n"
      "sdid_matching = off\n"
      "switch = 10:avatar-p\n"
      "switch = 20:n:fixed\n");
  EXPECT_EQ(c.mode, OperatingMode::AvatarR);
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.controller.t_on_min, 4'000'000'000u);
  EXPECT_EQ(c.flush_strategy, FlushStrategy::Bypass);
  EXPECT_EQ(c.trace.kind, TraceKind::ConflictSet);
  EXPECT_EQ(c.trace.params.length, 1000u);
  EXPECT_EQ(c.trace.params.domains, (std::vector<Sdid>{0, 2, 5}));
  EXPECT_EQ(c.engine.match_sdid, std::optional<bool>(false));
  ASSERT_EQ(c.switches.size(), 2u);
  EXPECT_EQ(c.switches[0],
            (ScheduledSwitch{10, OperatingMode::AvatarP, FlushStrategy::Bypass}));
  EXPECT_EQ(c.switches[1],
            (ScheduledSwitch{20, OperatingMode::AvatarN, FlushStrategy::Fixed}));
  EXPECT_NO_THROW(validate(c));
}

void expect_error(const std::string& text, const std::string& fragment) {
  try {
    parse(text);
    FAIL() << "accepted: " << text;
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos)
        << e.what();
  }
}

TEST(Config, ErrorsNameTheLine) {
  expect_error("mode = n\nbogus = 1\n", "unknown config key 'bogus' at line 2");
  expect_error("seed = 1\nseed = 2\n", "duplicate key 'seed' at line 2");
  expect_error("mode = avatar-q\n", "at line 1");
  expect_error("just words\n", "expected `key = value` at line 1");
  expect_error("read_ports = -3\n", "bad value");
  expect_error("t_on_cycles = 1.5\n", "bad value");
  expect_error("trace_domains = 0,16\n", "bad value");
  expect_error("switch = 10\n", "bad value");
  expect_error("sdid_matching = maybe\n", "bad value");
  expect_error("installs_per_second = 0\n", "bad value");
}

TEST(Config, ValidateCatchesCrossFieldErrors) {
  RunConfig c;
  c.controller.flush.read_ports = 0;
  EXPECT_THROW(validate(c), ConfigError);

  c = RunConfig{};
  apply_setting(c, "r_sets", "1000");
  EXPECT_THROW(validate(c), ConfigError);

  c = RunConfig{};
  apply_setting(c, "switch", "20:r");
  apply_setting(c, "switch", "10:n");
  EXPECT_THROW(validate(c), ConfigError);

  c = RunConfig{};
  apply_setting(c, "partitions", "0:0-127,1:100-200");
  EXPECT_THROW(validate(c), ConfigError);

  c = RunConfig{};
  apply_setting(c, "trace_footprint", "0");
  EXPECT_THROW(validate(c), ConfigError);
}

TEST(Config, EveryDocumentedKeyIsAccepted) {
  // Setting each key to a plausible value must not report it as unknown.
  for (const auto& key : config_keys()) {
    RunConfig c;
    try {
      apply_setting(c, key, "1");
    } catch (const ConfigError& e) {
      EXPECT_EQ(std::string(e.what()).find("unknown config key"),
                std::string::npos)
          << key;
    } catch (const std::exception&) {
    }
  }
}

TEST(Config, JsonEchoIsStable) {
  RunConfig c;
  apply_setting(c, "trace_kind", "occupancy-phase");
  const auto a = to_json(c).dump();
  EXPECT_EQ(a, to_json(c).dump());
  EXPECT_NE(a.find("\"attacker_lines\":131072"), std::string::npos);
}

}  // namespace
}  // namespace avatar

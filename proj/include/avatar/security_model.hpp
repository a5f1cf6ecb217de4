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

#ifndef AVATAR_SECURITY_MODEL_HPP_
#define AVATAR_SECURITY_MODEL_HPP_

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace avatar {

// 50 decimal digits with a binary exponent range far beyond what the tail
// needs; double underflows long before the 128-way spill probabilities.
using Real = boost::multiprecision::cpp_bin_float_50;

// Bucket-and-balls model of the randomized mode: buckets are skew-sets, balls
// are valid tag entries, a throw is a line install.
struct BallsConfig {
  uint32_t buckets_per_skew = 1024;
  uint32_t valid_ways_per_skew = 121;
  uint32_t spill_threshold_ways = 128;
  uint64_t throws = 1'000'000;
  uint64_t seed = 1;

  uint64_t total_balls() const {
    return uint64_t{2} * buckets_per_skew * valid_ways_per_skew;
  }
};

enum class DistributionSource { MonteCarlo, Analytical };

// Pr(n = N) for a single bucket.
struct OccupancyDistribution {
  DistributionSource source = DistributionSource::Analytical;
  std::map<uint32_t, Real> pr;

  Real at(uint32_t n) const;
  Real total() const;
};

struct MonteCarloResult {
  OccupancyDistribution distribution;
  // Bucket-throws spent at each occupancy; Pr(n=N) is weight[N] divided by
  // buckets * throws.
  std::vector<double> weight;
  // Times some bucket entered each occupancy during the measured loop.
  std::vector<uint64_t> visits;
  uint64_t throws = 0;
  uint64_t buckets = 0;
  uint64_t spills = 0;
  uint64_t total_balls = 0;
  uint32_t min_occupancy = 0;
  uint32_t max_occupancy = 0;

  double spill_rate() const {
    return throws == 0 ? 0.0
                       : static_cast<double>(spills) /
                             static_cast<double>(throws);
  }
};

// Fills to 2 * buckets * W_v balls with the two-choice rule, then runs
// `throws` steady-state steps of (remove a uniformly random ball, insert one
// by the two-choice rule). A spill is an insert whose two candidates both
// hold at least spill_threshold_ways balls; buckets are unbounded.
MonteCarloResult mc_simulate(const BallsConfig& config);

// Splits the throws across `workers` independent runs with derived seeds and
// merges the histograms.
MonteCarloResult mc_simulate_parallel(const BallsConfig& config,
                                      unsigned workers);

MonteCarloResult merge(std::span<const MonteCarloResult> parts);

struct TailOptions {
  // Below this probability on the descending side, the squared-term
  // approximation replaces the full recurrence.
  double approximation_cutoff = 0.01;
};

// Steady-state recurrence from an anchor value:
//   Pr(N+1) = W_v/(N+1) * (Pr(N)^2 + 2 Pr(N) Pr(n>N))
// with Pr(n>N) = 1 - (mass computed so far), switching to
//   Pr(N+1) = W_v/(N+1) * Pr(N)^2
// once Pr(N) is past the mode and below the cutoff. Throws
// std::invalid_argument unless 0 < anchor_pr < 1 and anchor_n < max_n.
OccupancyDistribution analytic_tail(uint32_t anchor_n, const Real& anchor_pr,
                                    uint32_t valid_ways, uint32_t max_n,
                                    TailOptions options = {});

// Anchor value at `anchor_n` for which the recurrence sums to one.
Real normalized_anchor(uint32_t anchor_n, uint32_t valid_ways, uint32_t max_n,
                       TailOptions options = {});

// 1 / Pr(n = W + 1): installs between spills of a W-way bucket.
Real installs_per_sae(const OccupancyDistribution& dist,
                      uint32_t spill_threshold_ways);

inline constexpr double kSecondsPerYear = 3.154e7;
inline constexpr double kDefaultInstallsPerSecond = 1.6e9;

Real installs_to_years(const Real& installs,
                       double installs_per_second = kDefaultInstallsPerSecond);

struct SweepPoint {
  uint32_t ways_per_skew = 0;
  uint32_t invalid_ways = 0;
  uint32_t valid_ways = 0;
  uint32_t anchor_n = 0;
  Real anchor_pr;
  Real installs_per_sae;
  Real years;
};

// Offset of the anchor below W_v used by the sweeps (88 for W_v = 121).
inline constexpr uint32_t kAnchorOffset = 33;

// One spill-rate estimate per (ways, invalid) pair, each anchored by
// normalization at W_v - kAnchorOffset.
SweepPoint sweep_point(uint32_t ways_per_skew, uint32_t invalid_ways,
                       double installs_per_second = kDefaultInstallsPerSecond);

}  // namespace avatar

#endif  // AVATAR_SECURITY_MODEL_HPP_

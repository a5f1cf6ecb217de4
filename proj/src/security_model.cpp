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

#include "avatar/security_model.hpp"

#include <algorithm>
#include <future>
#include <stdexcept>

#include "avatar/rng.hpp"

namespace avatar {

Real OccupancyDistribution::at(uint32_t n) const {
  const auto it = pr.find(n);
  return it == pr.end() ? Real(0) : it->second;
}

Real OccupancyDistribution::total() const {
  Real sum = 0;
  for (const auto& [n, p] : pr) sum += p;
  return sum;
}

namespace {

// Occupancy-level bookkeeping for the time-averaged histogram. A level's
// weight grows by (buckets at that level) x (throws it stayed that way).
class LevelHistogram {
 public:
  explicit LevelHistogram(size_t levels)
      : count_(levels, 0), last_(levels, 1), weight_(levels, 0),
        visits_(levels, 0) {}

  void seed(const std::vector<uint32_t>& occupancy) {
    for (uint32_t o : occupancy) {
      grow(o);
      ++count_[o];
    }
  }

  void move(uint32_t from, uint32_t to, uint64_t t) {
    grow(std::max(from, to));
    settle(from, t);
    settle(to, t);
    --count_[from];
    ++count_[to];
    ++visits_[to];
  }

  void finish(uint64_t end) {
    for (size_t n = 0; n < count_.size(); ++n) settle(n, end);
  }

  const std::vector<uint64_t>& weight() const { return weight_; }
  const std::vector<uint64_t>& visits() const { return visits_; }

 private:
  void grow(size_t level) {
    if (level < count_.size()) return;
    const size_t size = level + 16;
    count_.resize(size, 0);
    last_.resize(size, 1);
    weight_.resize(size, 0);
    visits_.resize(size, 0);
  }

  void settle(size_t n, uint64_t t) {
    weight_[n] += count_[n] * (t - last_[n]);
    last_[n] = t;
  }

  std::vector<uint64_t> count_;
  std::vector<uint64_t> last_;
  std::vector<uint64_t> weight_;
  std::vector<uint64_t> visits_;
};

void check_balls_config(const BallsConfig& c) {
  if (c.buckets_per_skew == 0 || c.valid_ways_per_skew == 0) {
    throw std::invalid_argument("buckets and valid ways must be positive");
  }
  if (c.throws == 0) throw std::invalid_argument("throws must be >= 1");
}

MonteCarloResult finalize(std::vector<double> weight,
                          std::vector<uint64_t> visits, uint64_t throws,
                          uint64_t buckets) {
  MonteCarloResult r;
  r.throws = throws;
  r.buckets = buckets;
  r.distribution.source = DistributionSource::MonteCarlo;
  const double samples =
      static_cast<double>(buckets) * static_cast<double>(throws);
  bool seen = false;
  for (uint32_t n = 0; n < weight.size(); ++n) {
    if (weight[n] <= 0) continue;
    r.distribution.pr[n] = Real(weight[n]) / Real(samples);
    if (!seen) r.min_occupancy = n;
    seen = true;
    r.max_occupancy = n;
  }
  r.weight = std::move(weight);
  r.visits = std::move(visits);
  return r;
}

}  // namespace

MonteCarloResult mc_simulate(const BallsConfig& config) {
  check_balls_config(config);
  Rng rng(config.seed);
  const uint32_t per_skew = config.buckets_per_skew;
  const uint32_t threshold = config.spill_threshold_ways;
  std::vector<uint32_t> occupancy(2 * size_t{per_skew}, 0);
  std::vector<uint32_t> balls;
  balls.reserve(config.total_balls());

  uint64_t spills = 0;
  // Two-choice insert: one candidate per skew, ties broken by a coin.
  auto insert = [&](bool count_spills) {
    const auto a = static_cast<uint32_t>(rng.below(per_skew));
    const auto b = static_cast<uint32_t>(per_skew + rng.below(per_skew));
    if (count_spills && occupancy[a] >= threshold &&
        occupancy[b] >= threshold) {
      ++spills;
    }
    uint32_t target;
    if (occupancy[a] != occupancy[b]) {
      target = occupancy[a] < occupancy[b] ? a : b;
    } else {
      target = rng.coin() ? b : a;
    }
    ++occupancy[target];
    balls.push_back(target);
    return target;
  };

  for (uint64_t i = 0; i < config.total_balls(); ++i) insert(false);

  LevelHistogram hist(4 * size_t{config.valid_ways_per_skew} + 64);
  hist.seed(occupancy);
  for (uint64_t t = 1; t <= config.throws; ++t) {
    const uint64_t k = rng.below(balls.size());
    const uint32_t out = balls[k];
    balls[k] = balls.back();
    balls.pop_back();
    hist.move(occupancy[out], occupancy[out] - 1, t);
    --occupancy[out];

    const uint32_t in = insert(true);
    hist.move(occupancy[in] - 1, occupancy[in], t);
  }
  hist.finish(config.throws + 1);

  std::vector<double> weight(hist.weight().begin(), hist.weight().end());
  MonteCarloResult r = finalize(std::move(weight), hist.visits(),
                                config.throws, occupancy.size());
  r.spills = spills;
  r.total_balls = balls.size();
  return r;
}

MonteCarloResult merge(std::span<const MonteCarloResult> parts) {
  if (parts.empty()) throw std::invalid_argument("nothing to merge");
  size_t levels = 0;
  for (const auto& p : parts) levels = std::max(levels, p.weight.size());
  std::vector<double> weight(levels, 0.0);
  std::vector<uint64_t> visits(levels, 0);
  uint64_t throws = 0;
  uint64_t spills = 0;
  const uint64_t buckets = parts.front().buckets;
  for (const auto& p : parts) {
    if (p.buckets != buckets) {
      throw std::invalid_argument("cannot merge different bucket counts");
    }
    for (size_t n = 0; n < p.weight.size(); ++n) weight[n] += p.weight[n];
    for (size_t n = 0; n < p.visits.size(); ++n) visits[n] += p.visits[n];
    throws += p.throws;
    spills += p.spills;
  }
  MonteCarloResult r =
      finalize(std::move(weight), std::move(visits), throws, buckets);
  r.spills = spills;
  r.total_balls = parts.front().total_balls;
  return r;
}

MonteCarloResult mc_simulate_parallel(const BallsConfig& config,
                                      unsigned workers) {
  check_balls_config(config);
  workers = std::max(1u, std::min<unsigned>(
                             workers, static_cast<unsigned>(config.throws)));
  Rng seeder(config.seed);
  std::vector<std::future<MonteCarloResult>> jobs;
  for (unsigned w = 0; w < workers; ++w) {
    BallsConfig part = config;
    part.throws = config.throws / workers + (w < config.throws % workers);
    part.seed = seeder.next();
    jobs.push_back(std::async(std::launch::async,
                              [part] { return mc_simulate(part); }));
  }
  std::vector<MonteCarloResult> results;
  for (auto& j : jobs) results.push_back(j.get());
  return merge(results);
}

OccupancyDistribution analytic_tail(uint32_t anchor_n, const Real& anchor_pr,
                                    uint32_t valid_ways, uint32_t max_n,
                                    TailOptions options) {
  if (!(anchor_pr > 0 && anchor_pr < 1)) {
    throw std::invalid_argument("anchor probability must lie in (0, 1)");
  }
  if (anchor_n >= max_n) {
    throw std::invalid_argument("anchor must lie below max_n");
  }
  OccupancyDistribution dist;
  dist.source = DistributionSource::Analytical;
  dist.pr[anchor_n] = anchor_pr;

  const Real ways(valid_ways);
  const Real cutoff(options.approximation_cutoff);
  Real mass = anchor_pr;
  Real previous = 0;
  bool squared_only = false;
  for (uint32_t n = anchor_n; n < max_n; ++n) {
    const Real p = dist.pr[n];
    if (!squared_only && n > anchor_n && p < previous && p < cutoff) {
      squared_only = true;
    }
    Real next;
    if (squared_only) {
      next = ways / (n + 1) * p * p;
    } else {
      const Real above = std::max(Real(0), Real(1) - mass);
      next = ways / (n + 1) * (p * p + 2 * p * above);
    }
    dist.pr[n + 1] = next;
    mass += next;
    previous = p;
  }
  return dist;
}

Real normalized_anchor(uint32_t anchor_n, uint32_t valid_ways, uint32_t max_n,
                       TailOptions options) {
  // Total mass grows with the anchor; bisect on its base-10 exponent.
  Real lo = -400;
  Real hi = log10(Real("0.999999"));
  for (int i = 0; i < 160; ++i) {
    const Real mid = (lo + hi) / 2;
    const Real total =
        analytic_tail(anchor_n, pow(Real(10), mid), valid_ways, max_n, options)
            .total();
    if (total > 1) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return pow(Real(10), (lo + hi) / 2);
}

Real installs_per_sae(const OccupancyDistribution& dist,
                      uint32_t spill_threshold_ways) {
  const auto it = dist.pr.find(spill_threshold_ways + 1);
  if (it == dist.pr.end()) {
    throw std::out_of_range("distribution does not reach the spill level");
  }
  return Real(1) / it->second;
}

Real installs_to_years(const Real& installs, double installs_per_second) {
  if (!(installs_per_second > 0)) {
    throw std::invalid_argument("install rate must be positive");
  }
  return installs / (Real(installs_per_second) * Real(kSecondsPerYear));
}

SweepPoint sweep_point(uint32_t ways_per_skew, uint32_t invalid_ways,
                       double installs_per_second) {
  if (invalid_ways >= ways_per_skew ||
      ways_per_skew - invalid_ways <= kAnchorOffset) {
    throw std::invalid_argument("too few valid ways for the sweep anchor");
  }
  SweepPoint p;
  p.ways_per_skew = ways_per_skew;
  p.invalid_ways = invalid_ways;
  p.valid_ways = ways_per_skew - invalid_ways;
  p.anchor_n = p.valid_ways - kAnchorOffset;
  const uint32_t max_n = ways_per_skew + 2;
  p.anchor_pr = normalized_anchor(p.anchor_n, p.valid_ways, max_n);
  const OccupancyDistribution dist =
      analytic_tail(p.anchor_n, p.anchor_pr, p.valid_ways, max_n);
  p.installs_per_sae = installs_per_sae(dist, ways_per_skew);
  p.years = installs_to_years(p.installs_per_sae, installs_per_second);
  return p;
}

}  // namespace avatar

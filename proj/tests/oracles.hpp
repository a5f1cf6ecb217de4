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


// Independent reference models used as test oracles. Nothing here calls into
// the library under test except for plain value types.

#ifndef AVATAR_TESTS_ORACLES_HPP_
#define AVATAR_TESTS_ORACLES_HPP_

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

namespace oracle {

// ---- Speck32/64 -------------------------------------------------------------
// Straight from the cipher definition, with the key schedule run alongside
// the rounds instead of precomputed.

inline uint16_t ror16(uint16_t v, int r) {
  return static_cast<uint16_t>((v >> r) | (v << (16 - r)));
}
inline uint16_t rol16(uint16_t v, int r) {
  return static_cast<uint16_t>((v << r) | (v >> (16 - r)));
}

inline uint32_t speck32_encrypt(uint64_t key, uint32_t block) {
  uint16_t k = static_cast<uint16_t>(key);
  std::array<uint16_t, 3> l{static_cast<uint16_t>(key >> 16),
                            static_cast<uint16_t>(key >> 32),
                            static_cast<uint16_t>(key >> 48)};
  uint16_t x = static_cast<uint16_t>(block >> 16);
  uint16_t y = static_cast<uint16_t>(block);
  for (int i = 0; i < 22; ++i) {
    x = static_cast<uint16_t>((ror16(x, 7) + y) ^ k);
    y = static_cast<uint16_t>(rol16(y, 2) ^ x);
    const uint16_t nl = static_cast<uint16_t>((k + ror16(l[i % 3], 7)) ^ i);
    l[i % 3] = nl;
    k = static_cast<uint16_t>(rol16(k, 2) ^ nl);
  }
  return (uint32_t{x} << 16) | y;
}

// ---- reference SRRIP cache --------------------------------------------------
// 3-bit RRPV, insert at 6, promote to 0 on hit; victim is the first empty way,
// otherwise the lowest-numbered way at 7 after ageing the whole set.

struct RefEvent {
  bool hit = false;
  std::optional<uint64_t> evicted;  // line address
  bool operator==(const RefEvent&) const = default;
};

class RefSrripCache {
 public:
  RefSrripCache(uint32_t sets, uint32_t ways)
      : sets_(sets), ways_(ways), lines_(sets, std::vector<Way>(ways)) {}

  RefEvent access(uint64_t line) {
    auto& set = lines_[line % sets_];
    for (Way& w : set) {
      if (w.valid && w.line == line) {
        w.rrpv = 0;
        return {true, std::nullopt};
      }
    }
    RefEvent ev;
    size_t victim = ways_;
    for (size_t i = 0; i < set.size() && victim == ways_; ++i) {
      if (!set[i].valid) victim = i;
    }
    while (victim == ways_) {
      for (size_t i = 0; i < set.size(); ++i) {
        if (set[i].rrpv == 7) {
          victim = i;
          break;
        }
      }
      if (victim == ways_) {
        for (Way& w : set) ++w.rrpv;
      }
    }
    if (set[victim].valid) ev.evicted = set[victim].line;
    set[victim] = {true, line, 6};
    return ev;
  }

 private:
  struct Way {
    bool valid = false;
    uint64_t line = 0;
    int rrpv = 0;
  };
  uint32_t sets_;
  uint32_t ways_;
  std::vector<std::vector<Way>> lines_;
};

// ---- tail recurrence in double precision ------------------------------------
// Adequate while the probabilities stay above ~1e-300.

inline std::map<uint32_t, double> tail_recurrence(uint32_t anchor_n,
                                                  double anchor,
                                                  uint32_t wv,
                                                  uint32_t max_n,
                                                  double cutoff = 0.01) {
  std::map<uint32_t, double> pr;
  pr[anchor_n] = anchor;
  double cumulative = anchor;
  double prev = anchor;
  double cur = anchor;
  bool squared_only = false;
  for (uint32_t n = anchor_n; n < max_n; ++n) {
    if (!squared_only && n > anchor_n && cur < prev && cur < cutoff) {
      squared_only = true;
    }
    const double above = std::max(0.0, 1.0 - cumulative);
    const double next =
        squared_only ? wv / double(n + 1) * cur * cur
                     : wv / double(n + 1) * (cur * cur + 2.0 * cur * above);
    prev = cur;
    cur = next;
    pr[n + 1] = next;
    cumulative += next;
  }
  return pr;
}

// ---- exact chain for 2 x 2 buckets and 4 balls ------------------------------
// State: occupancy of buckets {0,1} (skew 0) and {2,3} (skew 1). A step
// removes a uniformly random ball, then inserts one into the less loaded of
// a random bucket per skew (coin on ties).

struct TinyChain {
  std::vector<std::array<int, 4>> states;
  std::vector<double> stationary;

  static TinyChain solve(int balls = 4) {
    TinyChain c;
    std::map<std::array<int, 4>, size_t> index;
    for (int a = 0; a <= balls; ++a)
      for (int b = 0; a + b <= balls; ++b)
        for (int d = 0; a + b + d <= balls; ++d) {
          const std::array<int, 4> s{a, b, d, balls - a - b - d};
          index[s] = c.states.size();
          c.states.push_back(s);
        }
    const size_t n = c.states.size();
    std::vector<std::vector<double>> p(n, std::vector<double>(n, 0.0));
    for (size_t i = 0; i < n; ++i) {
      for (int out = 0; out < 4; ++out) {
        const auto& s = c.states[i];
        if (s[out] == 0) continue;
        const double p_out = double(s[out]) / balls;
        auto t = s;
        --t[out];
        for (int x = 0; x < 2; ++x) {
          for (int y = 2; y < 4; ++y) {
            if (t[x] != t[y]) {
              auto u = t;
              ++u[t[x] < t[y] ? x : y];
              p[i][index[u]] += p_out * 0.25;
            } else {
              auto u = t;
              ++u[x];
              p[i][index[u]] += p_out * 0.125;
              u = t;
              ++u[y];
              p[i][index[u]] += p_out * 0.125;
            }
          }
        }
      }
    }
    std::vector<double> pi(n, 1.0 / n);
    for (int it = 0; it < 20000; ++it) {
      std::vector<double> next(n, 0.0);
      for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) next[j] += pi[i] * p[i][j];
      pi.swap(next);
    }
    c.stationary = pi;
    return c;
  }

  // Probability that a step finds both candidates at >= threshold.
  double spill_rate(int threshold, int balls = 4) const {
    double rate = 0;
    for (size_t i = 0; i < states.size(); ++i) {
      for (int out = 0; out < 4; ++out) {
        auto t = states[i];
        if (t[out] == 0) continue;
        const double p_out = double(t[out]) / balls;
        --t[out];
        for (int x = 0; x < 2; ++x)
          for (int y = 2; y < 4; ++y)
            if (t[x] >= threshold && t[y] >= threshold)
              rate += stationary[i] * p_out * 0.25;
      }
    }
    return rate;
  }

  // Per-bucket occupancy distribution.
  double occupancy(int level) const {
    double p = 0;
    for (size_t i = 0; i < states.size(); ++i)
      for (int b = 0; b < 4; ++b)
        if (states[i][b] == level) p += stationary[i] / 4.0;
    return p;
  }
};

}  // namespace oracle

#endif  // AVATAR_TESTS_ORACLES_HPP_

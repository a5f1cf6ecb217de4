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

#include "avatar/speck.hpp"

#include <bit>

namespace avatar {
namespace {

constexpr int kAlpha = 7;
constexpr int kBeta = 2;

inline uint16_t ror(uint16_t v, int r) { return std::rotr(v, r); }
inline uint16_t rol(uint16_t v, int r) { return std::rotl(v, r); }

}  // namespace

Speck32::Speck32(uint64_t key) : key_(key) {
  std::array<uint16_t, kRounds + 2> l{};
  uint16_t k = static_cast<uint16_t>(key);
  l[0] = static_cast<uint16_t>(key >> 16);
  l[1] = static_cast<uint16_t>(key >> 32);
  l[2] = static_cast<uint16_t>(key >> 48);
  for (int i = 0; i < kRounds; ++i) {
    round_keys_[i] = k;
    if (i + 1 == kRounds) break;
    l[i + 3] = static_cast<uint16_t>((k + ror(l[i], kAlpha)) ^ i);
    k = static_cast<uint16_t>(rol(k, kBeta) ^ l[i + 3]);
  }
}

uint32_t Speck32::encrypt(uint32_t block) const {
  auto x = static_cast<uint16_t>(block >> 16);
  auto y = static_cast<uint16_t>(block);
  for (uint16_t rk : round_keys_) {
    x = static_cast<uint16_t>((ror(x, kAlpha) + y) ^ rk);
    y = static_cast<uint16_t>(rol(y, kBeta) ^ x);
  }
  return (static_cast<uint32_t>(x) << 16) | y;
}

uint32_t Speck32::decrypt(uint32_t block) const {
  auto x = static_cast<uint16_t>(block >> 16);
  auto y = static_cast<uint16_t>(block);
  for (int i = kRounds - 1; i >= 0; --i) {
    y = ror(static_cast<uint16_t>(y ^ x), kBeta);
    x = rol(static_cast<uint16_t>((x ^ round_keys_[i]) - y), kAlpha);
  }
  return (static_cast<uint32_t>(x) << 16) | y;
}

uint32_t speck_encrypt(uint32_t block, uint64_t key) {
  return Speck32(key).encrypt(block);
}

uint32_t speck_decrypt(uint32_t block, uint64_t key) {
  return Speck32(key).decrypt(block);
}

}  // namespace avatar

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

#ifndef AVATAR_SPECK_HPP_
#define AVATAR_SPECK_HPP_

#include <array>
#include <cstdint>

namespace avatar {

/// Speck32/64: 16-bit words, 22 rounds, 64-bit key.
///
/// The key is laid out as four 16-bit words (l2, l1, l0, k0) from most to
/// least significant, and blocks as (x, y) with x in the high half. This is
/// the layout used by the published test vectors.
class Speck32 {
 public:
  static constexpr int kRounds = 22;

  explicit Speck32(uint64_t key);

  uint32_t encrypt(uint32_t block) const;
  uint32_t decrypt(uint32_t block) const;

  uint64_t key() const { return key_; }

 private:
  uint64_t key_;
  std::array<uint16_t, kRounds> round_keys_{};
};

uint32_t speck_encrypt(uint32_t block, uint64_t key);
uint32_t speck_decrypt(uint32_t block, uint64_t key);

}  // namespace avatar

#endif  // AVATAR_SPECK_HPP_

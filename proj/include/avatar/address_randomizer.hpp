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

#ifndef AVATAR_ADDRESS_RANDOMIZER_HPP_
#define AVATAR_ADDRESS_RANDOMIZER_HPP_

#include <cstdint>

#include "avatar/geometry.hpp"
#include "avatar/speck.hpp"
#include "avatar/types.hpp"

namespace avatar {

struct SkewKey {
  uint64_t key = 0;
  uint8_t skew_id = 0;
};

struct IndexTag {
  uint32_t index = 0;
  uint64_t tag = 0;

  friend bool operator==(const IndexTag&, const IndexTag&) = default;
};

// Folds the 40-bit line address into the 32-bit cipher block by XOR-ing the
// top 8 bits into the low byte.
inline uint32_t fold(LineAddress addr) {
  const uint64_t v = addr.value();
  return static_cast<uint32_t>(v) ^ static_cast<uint32_t>(v >> 32);
}

bool is_power_of_two(uint64_t v);
uint32_t log2_exact(uint64_t v);

// Low log2(num_sets_per_skew) bits of Speck(fold(addr)). Throws
// std::invalid_argument unless the set count is a power of two <= 2^32.
uint32_t randomized_set_index(LineAddress addr, const SkewKey& skew,
                              uint64_t num_sets_per_skew);

// Deterministic split for Avatar-N and Avatar-P: index from the low bits,
// tag from the rest. Avatar-R is rejected.
IndexTag plain_index_and_tag(LineAddress addr, OperatingMode mode,
                             const CacheGeometry& geometry);
LineAddress plain_reconstruct(IndexTag slot, const CacheGeometry& geometry);

// Keyed mapping of one skew. The stored tag is the ciphertext above the index
// bits plus the 8 folded address bits, so (index, tag) is invertible and
// never aliases two lines.
class SkewMapper {
 public:
  SkewMapper() : SkewMapper(SkewKey{}, 0) {}
  SkewMapper(SkewKey key, uint32_t index_bits);

  IndexTag locate(LineAddress addr) const {
    const uint32_t block = cipher_.encrypt(fold(addr));
    const uint64_t high = addr.value() >> 32;
    return {block & index_mask_,
            (uint64_t{block} >> index_bits_) | (high << (32 - index_bits_))};
  }

  LineAddress reconstruct(IndexTag slot) const;

  uint8_t skew_id() const { return skew_id_; }

 private:
  Speck32 cipher_;
  uint8_t skew_id_;
  uint32_t index_bits_;
  uint32_t index_mask_;
};

}  // namespace avatar

#endif  // AVATAR_ADDRESS_RANDOMIZER_HPP_

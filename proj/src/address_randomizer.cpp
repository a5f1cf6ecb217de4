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

#include "avatar/address_randomizer.hpp"

#include <bit>
#include <stdexcept>

namespace avatar {

bool is_power_of_two(uint64_t v) { return v != 0 && std::has_single_bit(v); }

uint32_t log2_exact(uint64_t v) {
  if (!is_power_of_two(v)) {
    throw std::invalid_argument("value is not a power of two");
  }
  return static_cast<uint32_t>(std::countr_zero(v));
}

uint32_t randomized_set_index(LineAddress addr, const SkewKey& skew,
                              uint64_t num_sets_per_skew) {
  if (!is_power_of_two(num_sets_per_skew) ||
      num_sets_per_skew > (uint64_t{1} << 32)) {
    throw std::invalid_argument(
        "set count per skew must be a power of two no larger than 2^32");
  }
  const uint32_t block = speck_encrypt(fold(addr), skew.key);
  return static_cast<uint32_t>(block & (num_sets_per_skew - 1));
}

IndexTag plain_index_and_tag(LineAddress addr, OperatingMode mode,
                             const CacheGeometry& geometry) {
  if (mode == OperatingMode::AvatarR) {
    throw std::invalid_argument(
        "Avatar-R uses the keyed mapping, not the plain index split");
  }
  const uint32_t bits = geometry.index_bits();
  return {static_cast<uint32_t>(addr.value() & (geometry.num_sets - 1)),
          addr.value() >> bits};
}

LineAddress plain_reconstruct(IndexTag slot, const CacheGeometry& geometry) {
  return LineAddress((slot.tag << geometry.index_bits()) | slot.index);
}

SkewMapper::SkewMapper(SkewKey key, uint32_t index_bits)
    : cipher_(key.key),
      skew_id_(key.skew_id),
      index_bits_(index_bits),
      index_mask_(index_bits >= 32 ? 0xffffffffu : (1u << index_bits) - 1) {
  if (index_bits > 32) {
    throw std::invalid_argument("at most 32 index bits fit the cipher block");
  }
}

LineAddress SkewMapper::reconstruct(IndexTag slot) const {
  const uint32_t cipher_high_bits = 32 - index_bits_;
  const uint64_t high = slot.tag >> cipher_high_bits;
  const uint64_t cipher_high =
      slot.tag & ((uint64_t{1} << cipher_high_bits) - 1);
  const auto block =
      static_cast<uint32_t>((cipher_high << index_bits_) | slot.index);
  const uint32_t low = cipher_.decrypt(block) ^ static_cast<uint32_t>(high);
  return LineAddress((high << 32) | low);
}

}  // namespace avatar

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

#ifndef AVATAR_GEOMETRY_HPP_
#define AVATAR_GEOMETRY_HPP_

#include <cstdint>

#include "avatar/types.hpp"

namespace avatar {

// Shape of the tag store in one operating mode. Sets and ways are per skew.
struct CacheGeometry {
  OperatingMode mode = OperatingMode::AvatarN;
  uint32_t num_sets = 16384;
  uint32_t ways_per_set = 16;
  uint32_t num_skews = 1;
  uint32_t invalid_ways_per_skew = 0;
  uint32_t tag_bits = 26;

  // 16 MiB defaults: N = 16K x 16, R = 2 skews x 1K x 128 with 7 invalid
  // ways per skew, P = 1K x 256.
  static CacheGeometry defaults(OperatingMode mode);

  // tag_bits is derived from the set count.
  static CacheGeometry make(OperatingMode mode, uint32_t sets, uint32_t ways,
                            uint32_t skews, uint32_t invalid_ways);

  uint32_t index_bits() const;
  uint64_t total_entries() const {
    return uint64_t{num_skews} * num_sets * ways_per_set;
  }
  uint64_t valid_capacity_threshold() const {
    return uint64_t{num_skews} * num_sets *
           (ways_per_set - invalid_ways_per_skew);
  }

  // Throws ConfigError.
  void validate() const;

  friend bool operator==(const CacheGeometry&, const CacheGeometry&) = default;
};

}  // namespace avatar

#endif  // AVATAR_GEOMETRY_HPP_

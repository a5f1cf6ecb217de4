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

#ifndef AVATAR_TYPES_HPP_
#define AVATAR_TYPES_HPP_

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace avatar {

// Secure-domain ID. The default tag layout budgets 4 bits (16 domains); the
// partitioned mode may be configured with wider IDs.
using Sdid = uint16_t;
inline constexpr Sdid kDefaultMaxDomains = 16;

// Values are the 2-bit mode field of the control register.
enum class OperatingMode : uint8_t {
  AvatarN = 0b00,
  AvatarR = 0b01,
  AvatarP = 0b11,
};

std::string_view to_string(OperatingMode mode);
OperatingMode parse_mode(std::string_view text);
inline constexpr uint8_t msr_bits(OperatingMode mode) {
  return static_cast<uint8_t>(mode);
}
OperatingMode mode_from_msr(uint8_t bits);

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A simulator invariant was broken. Never a user error.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Cache-line address: a 46-bit physical address without its 6 offset bits.
class LineAddress {
 public:
  static constexpr int kBits = 40;
  static constexpr int kOffsetBits = 6;
  static constexpr int kPhysicalBits = kBits + kOffsetBits;
  static constexpr uint64_t kMask = (uint64_t{1} << kBits) - 1;

  constexpr LineAddress() = default;
  constexpr explicit LineAddress(uint64_t line) : value_(line) {
    if (line > kMask) throw std::out_of_range("line address exceeds 40 bits");
  }

  static constexpr LineAddress from_physical(uint64_t physical) {
    if (physical >> kPhysicalBits) {
      throw std::out_of_range("physical address exceeds 46 bits");
    }
    return LineAddress(physical >> kOffsetBits);
  }

  constexpr uint64_t value() const { return value_; }
  constexpr uint64_t physical() const { return value_ << kOffsetBits; }

  friend constexpr auto operator<=>(LineAddress, LineAddress) = default;

 private:
  uint64_t value_ = 0;
};

}  // namespace avatar

#endif  // AVATAR_TYPES_HPP_

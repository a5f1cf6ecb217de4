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


#ifndef AVATAR_TRACE_HPP_
#define AVATAR_TRACE_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "avatar/avatar_cache.hpp"
#include "avatar/rng.hpp"
#include "avatar/types.hpp"

namespace avatar {

inline constexpr Sdid kTraceMaxSdid = 15;

// One line of a trace file: `<sdid> <R|W|F> 0x<hex>`. The address is
// physical; the block offset is kept here and dropped by the cache.
struct TraceRecord {
  Sdid sdid = 0;
  Op op = Op::Read;
  uint64_t address = 0;

  AccessRequest request() const { return {sdid, op, address}; }

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

class TraceParseError : public std::runtime_error {
 public:
  TraceParseError(const std::string& what, uint64_t line, uint64_t column);

  uint64_t line() const { return line_; }
  uint64_t column() const { return column_; }

 private:
  uint64_t line_;
  uint64_t column_;
};

// Returns nullopt for blank and comment lines. `line_no` is 1-based and is
// only used for error messages.
std::optional<TraceRecord> parse_trace_line(std::string_view text,
                                            uint64_t line_no);
std::vector<TraceRecord> parse_trace(std::istream& in);

std::string format_record(const TraceRecord& record);
void write_trace(std::ostream& out, std::span<const TraceRecord> records);

enum class TraceKind : uint8_t {
  Uniform,
  Stream,
  PointerChase,
  ConflictSet,
  OccupancyPhase,
};

std::string_view to_string(TraceKind kind);
// Throws ConfigError for an unknown kind.
TraceKind parse_trace_kind(std::string_view text);

struct TraceParams {
  uint64_t length = 1'000'000;
  // Distinct lines touched. For conflict-set this is the number of
  // addresses that share one set.
  uint64_t footprint_lines = uint64_t{1} << 20;
  uint64_t base_line = 0;
  double write_fraction = 0.0;
  double flush_fraction = 0.0;
  // Requests are spread uniformly over these domains.
  std::vector<Sdid> domains{0};

  // conflict-set: target set in the Avatar-N index space.
  uint32_t conflict_set = 0;
  uint32_t conflict_index_bits = 14;

  // occupancy-phase: the attacker re-primes the same lines every phase, the
  // victim touches a fresh random footprint each phase.
  Sdid attacker = 0;
  Sdid victim = 1;
  uint64_t attacker_lines = 131072;
  uint64_t victim_lines = 65536;
};

// Streams records without materialising the whole trace.
class TraceGenerator {
 public:
  // Throws ConfigError on inconsistent parameters.
  TraceGenerator(TraceKind kind, TraceParams params, uint64_t seed);

  std::optional<TraceRecord> next();
  uint64_t emitted() const { return emitted_; }
  uint64_t length() const { return params_.length; }

 private:
  Op draw_op();
  Sdid draw_domain();
  uint64_t next_line();

  TraceKind kind_;
  TraceParams params_;
  Rng rng_;
  uint64_t emitted_ = 0;
  std::vector<uint32_t> chase_;  // successor table for pointer-chase
  uint64_t cursor_ = 0;
  Sdid phase_sdid_ = 0;
};

std::vector<TraceRecord> generate_trace(TraceKind kind,
                                        const TraceParams& params,
                                        uint64_t seed);

}  // namespace avatar

#endif  // AVATAR_TRACE_HPP_

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


#include "avatar/trace.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

namespace avatar {
namespace {

constexpr uint64_t kMaxPhysical = (uint64_t{1} << LineAddress::kPhysicalBits);

[[noreturn]] void fail(std::string_view what, uint64_t line, uint64_t col) {
  std::ostringstream msg;
  msg << what << " at line " << line << ", column " << col;
  throw TraceParseError(msg.str(), line, col);
}

struct Token {
  std::string_view text;
  uint64_t column = 0;
};

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    if (i >= s.size()) break;
    const size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != '\r') ++i;
    out.push_back({s.substr(start, i - start), start + 1});
  }
  return out;
}

}  // namespace

TraceParseError::TraceParseError(const std::string& what, uint64_t line,
                                 uint64_t column)
    : std::runtime_error(what), line_(line), column_(column) {}

std::optional<TraceRecord> parse_trace_line(std::string_view text,
                                            uint64_t line_no) {
  if (const auto hash = text.find('#'); hash != std::string_view::npos) {
    text = text.substr(0, hash);
  }
  const auto tokens = tokenize(text);
  if (tokens.empty()) return std::nullopt;
  if (tokens.size() < 3) {
    fail("expected `<sdid> <R|W|F> 0x<hex>`", line_no,
         tokens.back().column + tokens.back().text.size());
  }
  if (tokens.size() > 3) fail("unexpected token", line_no, tokens[3].column);

  TraceRecord rec;

  const Token& sd = tokens[0];
  unsigned long long sdid = 0;
  auto [p, ec] = std::from_chars(sd.text.data(), sd.text.data() + sd.text.size(),
                                 sdid, 10);
  if (ec == std::errc::result_out_of_range) {
    fail("sdid out of range", line_no, sd.column);
  }
  if (ec != std::errc() || p != sd.text.data() + sd.text.size()) {
    fail("malformed sdid", line_no, sd.column);
  }
  if (sdid > kTraceMaxSdid) fail("sdid out of range", line_no, sd.column);
  rec.sdid = static_cast<Sdid>(sdid);

  const Token& op = tokens[1];
  if (op.text == "R") {
    rec.op = Op::Read;
  } else if (op.text == "W") {
    rec.op = Op::Write;
  } else if (op.text == "F") {
    rec.op = Op::Flush;
  } else {
    fail("malformed op token", line_no, op.column);
  }

  const Token& ad = tokens[2];
  std::string_view hex = ad.text;
  if (hex.size() < 3 || hex[0] != '0' || (hex[1] != 'x' && hex[1] != 'X')) {
    fail("malformed address", line_no, ad.column);
  }
  hex.remove_prefix(2);
  uint64_t addr = 0;
  auto [q, ec2] = std::from_chars(hex.data(), hex.data() + hex.size(), addr, 16);
  if (ec2 == std::errc::result_out_of_range) {
    fail("address exceeds 46 bits", line_no, ad.column);
  }
  if (ec2 != std::errc() || q != hex.data() + hex.size()) {
    fail("malformed address", line_no, ad.column);
  }
  if (addr >= kMaxPhysical) fail("address exceeds 46 bits", line_no, ad.column);
  rec.address = addr;
  return rec;
}

std::vector<TraceRecord> parse_trace(std::istream& in) {
  std::vector<TraceRecord> out;
  std::string line;
  uint64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto rec = parse_trace_line(line, line_no)) out.push_back(*rec);
  }
  return out;
}

std::string format_record(const TraceRecord& r) {
  const char op = r.op == Op::Read ? 'R' : r.op == Op::Write ? 'W' : 'F';
  std::ostringstream s;
  s << r.sdid << ' ' << op << " 0x" << std::hex << r.address;
  return s.str();
}

void write_trace(std::ostream& out, std::span<const TraceRecord> records) {
  for (const auto& r : records) out << format_record(r) << '\n';
}

std::string_view to_string(TraceKind kind) {
  switch (kind) {
    case TraceKind::Uniform: return "uniform";
    case TraceKind::Stream: return "stream";
    case TraceKind::PointerChase: return "pointer-chase";
    case TraceKind::ConflictSet: return "conflict-set";
    case TraceKind::OccupancyPhase: return "occupancy-phase";
  }
  return "?";
}

TraceKind parse_trace_kind(std::string_view text) {
  for (auto k : {TraceKind::Uniform, TraceKind::Stream, TraceKind::PointerChase,
                 TraceKind::ConflictSet, TraceKind::OccupancyPhase}) {
    if (text == to_string(k)) return k;
  }
  throw ConfigError("unknown trace kind: " + std::string(text));
}

TraceGenerator::TraceGenerator(TraceKind kind, TraceParams params,
                               uint64_t seed)
    : kind_(kind), params_(std::move(params)), rng_(seed) {
  const auto& p = params_;
  if (p.footprint_lines == 0) throw ConfigError("trace footprint must be > 0");
  if (p.write_fraction < 0 || p.flush_fraction < 0 ||
      p.write_fraction + p.flush_fraction > 1.0) {
    throw ConfigError("write/flush fractions must lie in [0,1] and sum to <= 1");
  }
  if (p.domains.empty()) throw ConfigError("trace needs at least one domain");
  for (Sdid d : p.domains) {
    if (d > kTraceMaxSdid) throw ConfigError("trace domain out of range");
  }

  uint64_t span = p.footprint_lines;
  switch (kind_) {
    case TraceKind::ConflictSet: {
      if (p.conflict_index_bits >= LineAddress::kBits ||
          p.conflict_set >= (uint64_t{1} << p.conflict_index_bits)) {
        throw ConfigError("conflict set outside the index space");
      }
      const uint64_t tags = uint64_t{1}
                            << (LineAddress::kBits - p.conflict_index_bits);
      if (p.base_line + p.footprint_lines > tags) {
        throw ConfigError("conflict-set footprint exceeds the tag space");
      }
      span = 0;
      break;
    }
    case TraceKind::OccupancyPhase:
      if (p.attacker_lines + p.victim_lines == 0) {
        throw ConfigError("occupancy-phase needs a non-empty phase");
      }
      if (p.attacker > kTraceMaxSdid || p.victim > kTraceMaxSdid) {
        throw ConfigError("trace domain out of range");
      }
      span = p.attacker_lines + p.footprint_lines;
      break;
    case TraceKind::PointerChase:
      if (p.footprint_lines > (uint64_t{1} << 28)) {
        throw ConfigError("pointer-chase footprint limited to 2^28 lines");
      }
      break;
    default:
      break;
  }
  if (p.base_line + span > (uint64_t{1} << LineAddress::kBits)) {
    throw ConfigError("trace addresses exceed the 40-bit line space");
  }

  if (kind_ == TraceKind::PointerChase) {
    // Sattolo's shuffle: a single cycle through every line.
    const auto n = static_cast<uint32_t>(p.footprint_lines);
    chase_.resize(n);
    for (uint32_t i = 0; i < n; ++i) chase_[i] = i;
    for (uint32_t i = n - 1; i > 0; --i) {
      std::swap(chase_[i], chase_[rng_.below(i)]);
    }
  }
}

Op TraceGenerator::draw_op() {
  if (params_.write_fraction == 0.0 && params_.flush_fraction == 0.0) {
    return Op::Read;
  }
  const double u = rng_.uniform();
  if (u < params_.flush_fraction) return Op::Flush;
  if (u < params_.flush_fraction + params_.write_fraction) return Op::Write;
  return Op::Read;
}

Sdid TraceGenerator::draw_domain() {
  const auto& d = params_.domains;
  return d.size() == 1 ? d.front() : d[rng_.below(d.size())];
}

uint64_t TraceGenerator::next_line() {
  const auto& p = params_;
  const uint64_t i = emitted_;
  switch (kind_) {
    case TraceKind::Uniform:
      return p.base_line + rng_.below(p.footprint_lines);
    case TraceKind::Stream:
      return p.base_line + i % p.footprint_lines;
    case TraceKind::PointerChase: {
      const uint64_t line = p.base_line + cursor_;
      cursor_ = chase_[cursor_];
      return line;
    }
    case TraceKind::ConflictSet: {
      const uint64_t tag = p.base_line + i % p.footprint_lines;
      return (tag << p.conflict_index_bits) | p.conflict_set;
    }
    case TraceKind::OccupancyPhase: {
      const uint64_t phase = p.attacker_lines + p.victim_lines;
      const uint64_t k = i % phase;
      if (k < p.attacker_lines) {
        phase_sdid_ = p.attacker;
        return p.base_line + k;
      }
      phase_sdid_ = p.victim;
      return p.base_line + p.attacker_lines + rng_.below(p.footprint_lines);
    }
  }
  return 0;
}

std::optional<TraceRecord> TraceGenerator::next() {
  if (emitted_ >= params_.length) return std::nullopt;
  TraceRecord rec;
  const uint64_t line = next_line();
  rec.sdid =
      kind_ == TraceKind::OccupancyPhase ? phase_sdid_ : draw_domain();
  rec.op = draw_op();
  rec.address = LineAddress(line).physical();
  ++emitted_;
  return rec;
}

std::vector<TraceRecord> generate_trace(TraceKind kind,
                                        const TraceParams& params,
                                        uint64_t seed) {
  TraceGenerator gen(kind, params, seed);
  std::vector<TraceRecord> out;
  out.reserve(params.length);
  while (auto rec = gen.next()) out.push_back(*rec);
  return out;
}

}  // namespace avatar

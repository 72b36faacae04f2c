// Copyright 2026 The hdcam Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hdcam/rescue.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <string>

#include "hdcam/binio.hpp"
#include "hdcam/error.hpp"
#include "hdcam/hash.hpp"

namespace hdcam {

RescueBuffer::RescueBuffer(std::uint32_t blocks, std::size_t segment_bytes)
    : blocks_(blocks), segment_bytes_(segment_bytes) {
  if (blocks == 0 || segment_bytes == 0) {
    throw DimensionError("rescue buffer needs B > 0 and non-empty segments");
  }
}

void RescueBuffer::append(std::span<const std::uint32_t> addresses,
                          std::span<const std::uint8_t> segments, std::int32_t tid) {
  if (addresses.size() != blocks_ || segments.size() != blocks_ * segment_bytes_) {
    throw DimensionError("rescue sample does not match buffer geometry");
  }
  addresses_.insert(addresses_.end(), addresses.begin(), addresses.end());
  segments_.insert(segments_.end(), segments.begin(), segments.end());
  tids_.push_back(tid);
}

double check_rescue_rate(double rr) {
  if (!(rr >= 0.0 && rr <= 1.0)) {
    throw ConfigError("rescue rate must lie in [0, 1], got " + std::to_string(rr));
  }
  return rr;
}

RescueTable::RescueTable(std::uint32_t blocks, std::size_t segment_bytes)
    : blocks_(blocks), segment_bytes_(segment_bytes) {}

std::size_t RescueTable::total_entries() const {
  std::size_t n = 0;
  for (const auto& b : blocks_) n += b.addresses.size();
  return n;
}

RescueTable finalize(const RescueBuffer& buffer, double rr, std::uint64_t seed) {
  check_rescue_rate(rr);
  RescueTable table(buffer.blocks(), buffer.segment_bytes());
  if (rr == 0.0) return table;

  std::vector<std::size_t> kept;
  kept.reserve(buffer.size());
  SplitMix64 rng(seed);
  for (std::size_t s = 0; s < buffer.size(); ++s) {
    if (rr >= 1.0 || rng.unit() < rr) kept.push_back(s);
  }

  const std::size_t nb = buffer.segment_bytes();
  std::vector<std::size_t> order(kept.size());
  for (std::uint32_t b = 0; b < buffer.blocks(); ++b) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
      return buffer.address(kept[x], b) < buffer.address(kept[y], b);
    });
    auto& blk = table.blocks_[b];
    blk.addresses.resize(kept.size());
    blk.tids.resize(kept.size());
    blk.segments.resize(kept.size() * nb);
    for (std::size_t i = 0; i < order.size(); ++i) {
      std::size_t s = kept[order[i]];
      blk.addresses[i] = buffer.address(s, b);
      blk.tids[i] = buffer.tid(s);
      std::memcpy(blk.segments.data() + i * nb, buffer.segment(s, b), nb);
    }
  }
  return table;
}

ResolveResult RescueTable::resolve(std::uint32_t block, std::uint32_t addr,
                                   std::span<const std::uint8_t> query_segment) const {
  ResolveResult r;
  if (block >= blocks_.size()) return r;
  if (query_segment.size() != segment_bytes_) {
    throw DimensionError("resolve: query segment has the wrong length");
  }
  const auto& a = blocks_[block].addresses;
  auto counted_less = [&r](std::uint32_t x, std::uint32_t y) {
    ++r.address_comparisons;
    return x < y;
  };
  auto lo = std::lower_bound(a.begin(), a.end(), addr, counted_less);
  auto hi = std::upper_bound(lo, a.end(), addr, counted_less);
  for (auto it = lo; it != hi; ++it) {
    auto i = static_cast<std::size_t>(it - a.begin());
    ++r.segment_comparisons;
    if (std::memcmp(segment(block, i), query_segment.data(), segment_bytes_) == 0) {
      r.tid = blocks_[block].tids[i];
      break;
    }
  }
  return r;
}

VoteResult vote_with_rescue(const BlockMemory& memory, const RescueTable& table,
                            const Hypervector& hv, const DiffuserBank& bank) {
  memory.check_bank(bank);
  const std::uint32_t B = memory.blocks();
  std::vector<std::uint32_t> addrs = bank.addresses(hv);
  std::vector<std::int32_t> votes(B);
  std::vector<std::uint8_t> seg(bank.segment_bytes());
  const bool usable = !table.empty() && table.blocks() == B &&
                      table.segment_bytes() == bank.segment_bytes();
  for (std::uint32_t b = 0; b < B; ++b) {
    std::int32_t v = memory.cell(b, addrs[b]);
    if (usable && (v == kCollision || is_bucket_ref(v))) {
      bank.segment(hv, b, seg.data());
      ResolveResult r = table.resolve(b, addrs[b], seg);
      if (r.tid) v = *r.tid;
    }
    votes[b] = v;
  }
  return majority_vote(votes);
}

namespace {
constexpr char kMagic[9] = "HDCAMRSC";
constexpr std::uint32_t kVersion = 1;
}  // namespace

void RescueTable::save(const std::filesystem::path& path) const {
  const std::string p = path.string();
  auto os = binio::open_out(p);
  binio::put_bytes(os, kMagic, 8);
  binio::put_u32(os, kVersion);
  binio::put_u32(os, blocks());
  binio::put_u64(os, segment_bytes_);
  for (const auto& blk : blocks_) {
    binio::put_u64(os, blk.addresses.size());
    for (std::size_t i = 0; i < blk.addresses.size(); ++i) {
      binio::put_u32(os, blk.addresses[i]);
      binio::put_bytes(os, blk.segments.data() + i * segment_bytes_, segment_bytes_);
      binio::put_i32(os, blk.tids[i]);
    }
  }
  binio::finish(os, p);
}

RescueTable RescueTable::load(const std::filesystem::path& path) {
  auto is = binio::open_in(path.string());
  binio::expect_magic(is, kMagic);
  if (binio::get_u32(is) != kVersion) throw FormatError("unsupported rescue table version");
  std::uint32_t blocks = binio::get_u32(is);
  std::uint64_t nb = binio::get_u64(is);
  RescueTable t(blocks, nb);
  for (auto& blk : t.blocks_) {
    std::uint64_t n = binio::get_u64(is);
    blk.addresses.resize(n);
    blk.tids.resize(n);
    blk.segments.resize(n * nb);
    for (std::uint64_t i = 0; i < n; ++i) {
      blk.addresses[i] = binio::get_u32(is);
      binio::get_bytes(is, blk.segments.data() + i * nb, nb);
      blk.tids[i] = binio::get_i32(is);
      if (i > 0 && blk.addresses[i] < blk.addresses[i - 1]) {
        throw FormatError("rescue table block is not sorted");
      }
    }
  }
  return t;
}

}  // namespace hdcam

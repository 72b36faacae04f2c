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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "hdcam/block_memory.hpp"
#include "hdcam/galois.hpp"
#include "hdcam/hypervector.hpp"

namespace hdcam {

// Write-time samples: per learn, the B addresses, the B packed segments and
// the tid. Append-only.
class RescueBuffer {
 public:
  RescueBuffer(std::uint32_t blocks, std::size_t segment_bytes);

  void append(std::span<const std::uint32_t> addresses,
              std::span<const std::uint8_t> segments, std::int32_t tid);

  std::size_t size() const { return tids_.size(); }
  std::uint32_t blocks() const { return blocks_; }
  std::size_t segment_bytes() const { return segment_bytes_; }

  std::uint32_t address(std::size_t sample, std::uint32_t block) const {
    return addresses_[sample * blocks_ + block];
  }
  const std::uint8_t* segment(std::size_t sample, std::uint32_t block) const {
    return segments_.data() + (sample * blocks_ + block) * segment_bytes_;
  }
  std::int32_t tid(std::size_t sample) const { return tids_[sample]; }

 private:
  std::uint32_t blocks_;
  std::size_t segment_bytes_;
  std::vector<std::uint32_t> addresses_;
  std::vector<std::uint8_t> segments_;
  std::vector<std::int32_t> tids_;
};

// Throws ConfigError unless 0 <= rr <= 1.
double check_rescue_rate(double rr);

struct ResolveResult {
  std::optional<std::int32_t> tid;
  std::uint32_t address_comparisons = 0;
  std::uint32_t segment_comparisons = 0;
};

// Per-block arrays of (address, segment, tid) sorted by address; equal
// addresses keep insertion order.
class RescueTable {
 public:
  RescueTable() = default;
  RescueTable(std::uint32_t blocks, std::size_t segment_bytes);

  std::uint32_t blocks() const { return static_cast<std::uint32_t>(blocks_.size()); }
  std::size_t segment_bytes() const { return segment_bytes_; }
  std::size_t block_size(std::uint32_t b) const { return blocks_[b].addresses.size(); }
  std::size_t total_entries() const;
  bool empty() const { return total_entries() == 0; }

  std::uint32_t address(std::uint32_t b, std::size_t i) const { return blocks_[b].addresses[i]; }
  const std::uint8_t* segment(std::uint32_t b, std::size_t i) const {
    return blocks_[b].segments.data() + i * segment_bytes_;
  }
  std::int32_t tid(std::uint32_t b, std::size_t i) const { return blocks_[b].tids[i]; }

  // Binary search for [lo, hi) at addr, then the first byte-exact segment.
  ResolveResult resolve(std::uint32_t block, std::uint32_t addr,
                        std::span<const std::uint8_t> query_segment) const;

  void save(const std::filesystem::path& path) const;
  static RescueTable load(const std::filesystem::path& path);

  friend RescueTable finalize(const RescueBuffer& buffer, double rr,
                              std::uint64_t seed);

 private:
  struct Block {
    std::vector<std::uint32_t> addresses;
    std::vector<std::uint8_t> segments;
    std::vector<std::int32_t> tids;
  };
  std::vector<Block> blocks_;
  std::size_t segment_bytes_ = 0;
};

// rr = 0 gives an empty table, rr = 1 keeps every sample, otherwise each
// sample survives an independent seeded Bernoulli(rr) draw.
RescueTable finalize(const RescueBuffer& buffer, double rr, std::uint64_t seed);

// Reads the B cells, resolves every collided or bucket cell through the
// table, then votes. An empty table reduces to majority_vote.
VoteResult vote_with_rescue(const BlockMemory& memory, const RescueTable& table,
                            const Hypervector& hv, const DiffuserBank& bank);

}  // namespace hdcam

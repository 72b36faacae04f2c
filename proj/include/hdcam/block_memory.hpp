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

#include <climits>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "hdcam/galois.hpp"
#include "hdcam/hypervector.hpp"

namespace hdcam {

class RescueBuffer;

// Cell encoding: tid >= 0, kCollision, or a bucket reference -(index + 2).
inline constexpr std::int32_t kEmpty = INT32_MIN;
inline constexpr std::int32_t kCollision = -1;
inline constexpr std::int32_t kMaxTid = INT32_MAX - 2;

constexpr std::int32_t bucket_ref(std::uint32_t index) {
  return -static_cast<std::int32_t>(index) - 2;
}
constexpr bool is_bucket_ref(std::int32_t v) { return v < -1 && v != kEmpty; }
constexpr std::uint32_t bucket_index(std::int32_t v) {
  return static_cast<std::uint32_t>(-(v + 2));
}

// Dense tid <-> label map; tids are handed out from 0 in insertion order.
class LabelTable {
 public:
  std::int32_t intern(std::string_view label);
  std::optional<std::int32_t> find(std::string_view label) const;
  const std::string& label(std::int32_t tid) const;
  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, std::int32_t> ids_;
};

struct VoteResult {
  std::optional<std::int32_t> winner;
  std::uint32_t winner_votes = 0;
  std::uint32_t losing_votes = 0;
  std::uint32_t dont_care_blocks = 0;
  std::uint32_t blocks = 0;
  double cr1 = 0.0;
};

// Negative and EMPTY cells are Don't Care. Ties go to the lowest tid.
VoteResult majority_vote(std::span<const std::int32_t> votes);

struct CollisionStats {
  std::uint64_t learns = 0;
  std::uint64_t write_attempts = 0;
  std::uint64_t flagged_attempts = 0;
  std::uint64_t flagged_cells = 0;
  std::uint64_t total_cells = 0;

  double location_rate() const {
    return total_cells == 0 ? 0.0
                            : static_cast<double>(flagged_cells) /
                                  static_cast<double>(total_cells);
  }
  double count_rate() const {
    return write_attempts == 0 ? 0.0
                               : static_cast<double>(flagged_attempts) /
                                     static_cast<double>(write_attempts);
  }
};

enum class StorageKind : std::uint32_t { dense = 0, sparse = 1, automatic = 2 };

// Memories up to this many cells are stored densely by default.
inline constexpr std::uint64_t kDenseCellLimit = std::uint64_t{1} << 24;

// B blocks of 2^m cells. Dense storage is a flat array; sparse storage keeps
// one open-addressing table per block holding only written cells. Both
// return kEmpty for cells never written.
class BlockMemory {
 public:
  BlockMemory(std::uint32_t blocks, unsigned depth_bits, std::size_t dimension,
              std::uint64_t master_seed,
              StorageKind storage = StorageKind::automatic);
  ~BlockMemory();
  BlockMemory(BlockMemory&&) noexcept;
  BlockMemory& operator=(BlockMemory&&) noexcept;

  std::uint32_t blocks() const { return blocks_; }
  unsigned depth_bits() const { return depth_bits_; }
  std::size_t dimension() const { return dimension_; }
  std::uint64_t master_seed() const { return master_seed_; }
  StorageKind storage() const { return storage_; }

  // Writes hv's addresses with the tid of label. With a rescue buffer,
  // collided cells become bucket references and the sample is recorded.
  std::int32_t learn(const Hypervector& hv, std::string_view label,
                     const DiffuserBank& bank, RescueBuffer* rescue = nullptr);

  void read_votes(const Hypervector& hv, const DiffuserBank& bank,
                  std::span<std::int32_t> out) const;
  std::vector<std::int32_t> read_votes(const Hypervector& hv,
                                       const DiffuserBank& bank) const;
  VoteResult vote(const Hypervector& hv, const DiffuserBank& bank) const;

  std::int32_t cell(std::uint32_t block, std::uint32_t address) const;
  std::uint64_t occupied_cells(std::uint32_t block) const;

  // Fault injection: mark one cell as collided without touching counters.
  void mark_collided(std::uint32_t block, std::uint32_t address);

  const std::vector<std::int32_t>& bucket(std::uint32_t index) const {
    return buckets_.at(index);
  }
  std::size_t bucket_count() const { return buckets_.size(); }

  const LabelTable& labels() const { return labels_; }
  const CollisionStats& stats() const { return stats_; }

  void finalize() { finalized_ = true; }
  bool finalized() const { return finalized_; }

  // Snapshot: header, label table, buckets, then cells per block. A loaded
  // memory is finalized.
  void save(const std::filesystem::path& path) const;
  static BlockMemory load(const std::filesystem::path& path);

  void check_bank(const DiffuserBank& bank) const;

 private:
  struct Store;

  void set_cell(std::uint32_t block, std::uint32_t address, std::int32_t v);

  std::uint32_t blocks_;
  unsigned depth_bits_;
  std::size_t dimension_;
  std::uint64_t master_seed_;
  StorageKind storage_;
  bool finalized_ = false;
  LabelTable labels_;
  CollisionStats stats_;
  std::vector<std::vector<std::int32_t>> buckets_;
  std::unordered_set<std::uint64_t> learned_;
  std::unique_ptr<Store> store_;
};

}  // namespace hdcam

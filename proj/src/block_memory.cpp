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

#include "hdcam/block_memory.hpp"

#include <algorithm>
#include <string>

#include "hdcam/binio.hpp"
#include "hdcam/error.hpp"
#include "hdcam/hash.hpp"
#include "hdcam/rescue.hpp"

namespace hdcam {

std::int32_t LabelTable::intern(std::string_view label) {
  auto it = ids_.find(std::string(label));
  if (it != ids_.end()) return it->second;
  if (labels_.size() > static_cast<std::size_t>(kMaxTid)) {
    throw CapacityError("label table full: tid would exceed 2^31-3");
  }
  auto tid = static_cast<std::int32_t>(labels_.size());
  labels_.emplace_back(label);
  ids_.emplace(labels_.back(), tid);
  return tid;
}

std::optional<std::int32_t> LabelTable::find(std::string_view label) const {
  auto it = ids_.find(std::string(label));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

const std::string& LabelTable::label(std::int32_t tid) const {
  if (tid < 0 || static_cast<std::size_t>(tid) >= labels_.size()) {
    throw UnknownNodeError("no label for tid " + std::to_string(tid));
  }
  return labels_[static_cast<std::size_t>(tid)];
}

VoteResult majority_vote(std::span<const std::int32_t> votes) {
  VoteResult r;
  r.blocks = static_cast<std::uint32_t>(votes.size());
  std::int32_t small[1024];
  std::vector<std::int32_t> big;
  std::int32_t* valid = small;
  if (votes.size() > 1024) {
    big.resize(votes.size());
    valid = big.data();
  }
  std::size_t n = 0;
  for (std::int32_t v : votes) {
    if (v >= 0) valid[n++] = v;
  }
  r.dont_care_blocks = static_cast<std::uint32_t>(votes.size() - n);
  if (n == 0) return r;
  std::sort(valid, valid + n);
  std::int32_t best = valid[0];
  std::size_t best_count = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && valid[j] == valid[i]) ++j;
    if (j - i > best_count) {  // strict: the earlier (lower) tid keeps ties
      best_count = j - i;
      best = valid[i];
    }
    i = j;
  }
  r.winner = best;
  r.winner_votes = static_cast<std::uint32_t>(best_count);
  r.losing_votes = static_cast<std::uint32_t>(n - best_count);
  r.cr1 = static_cast<double>(best_count) / static_cast<double>(votes.size());
  return r;
}

// ---------------------------------------------------------------------------

namespace {

struct Slot {
  std::uint32_t address;
  std::int32_t value;  // kEmpty marks a free slot
};

class SparseBlock {
 public:
  std::int32_t get(std::uint32_t a) const {
    if (slots_.empty()) return kEmpty;
    std::size_t mask = slots_.size() - 1;
    for (std::size_t i = hash(a) & mask;; i = (i + 1) & mask) {
      const Slot& s = slots_[i];
      if (s.value == kEmpty) return kEmpty;
      if (s.address == a) return s.value;
    }
  }

  void set(std::uint32_t a, std::int32_t v) {
    if ((used_ + 1) * 2 > slots_.size()) grow();
    std::size_t mask = slots_.size() - 1;
    for (std::size_t i = hash(a) & mask;; i = (i + 1) & mask) {
      Slot& s = slots_[i];
      if (s.value == kEmpty) {
        s.address = a;
        s.value = v;
        ++used_;
        return;
      }
      if (s.address == a) {
        s.value = v;
        return;
      }
    }
  }

  std::size_t size() const { return used_; }

  std::vector<Slot> sorted() const {
    std::vector<Slot> out;
    out.reserve(used_);
    for (const Slot& s : slots_) {
      if (s.value != kEmpty) out.push_back(s);
    }
    std::sort(out.begin(), out.end(),
              [](const Slot& x, const Slot& y) { return x.address < y.address; });
    return out;
  }

 private:
  static std::size_t hash(std::uint32_t a) {
    return static_cast<std::size_t>(mix64(a + kGolden));
  }

  void grow() {
    std::vector<Slot> old = std::move(slots_);
    slots_.assign(old.empty() ? 16 : old.size() * 2, Slot{0, kEmpty});
    used_ = 0;
    for (const Slot& s : old) {
      if (s.value != kEmpty) set(s.address, s.value);
    }
  }

  std::vector<Slot> slots_;
  std::size_t used_ = 0;
};

}  // namespace

struct BlockMemory::Store {
  std::uint64_t cells_per_block = 0;
  std::vector<std::int32_t> dense;
  std::vector<SparseBlock> sparse;
  std::vector<std::uint64_t> dense_used;
};

BlockMemory::BlockMemory(std::uint32_t blocks, unsigned depth_bits,
                         std::size_t dimension, std::uint64_t master_seed,
                         StorageKind storage)
    : blocks_(blocks),
      depth_bits_(depth_bits),
      dimension_(dimension),
      master_seed_(master_seed),
      store_(std::make_unique<Store>()) {
  if (blocks == 0) throw DimensionError("block count must be positive");
  if (depth_bits < 1 || depth_bits > 32) {
    throw DimensionError("depth exponent must be in [1, 32]");
  }
  if (dimension == 0 || dimension % blocks != 0) {
    throw DimensionError("L = " + std::to_string(dimension) +
                         " is not a positive multiple of B = " +
                         std::to_string(blocks));
  }
  store_->cells_per_block = std::uint64_t{1} << depth_bits;
  stats_.total_cells = store_->cells_per_block * blocks;
  if (storage == StorageKind::automatic) {
    storage = stats_.total_cells <= kDenseCellLimit ? StorageKind::dense
                                                    : StorageKind::sparse;
  }
  storage_ = storage;
  if (storage_ == StorageKind::dense) {
    store_->dense.assign(stats_.total_cells, kEmpty);
    store_->dense_used.assign(blocks, 0);
  } else {
    store_->sparse.resize(blocks);
  }
}

BlockMemory::~BlockMemory() = default;
BlockMemory::BlockMemory(BlockMemory&&) noexcept = default;
BlockMemory& BlockMemory::operator=(BlockMemory&&) noexcept = default;

std::int32_t BlockMemory::cell(std::uint32_t block, std::uint32_t address) const {
  if (storage_ == StorageKind::dense) {
    return store_->dense[block * store_->cells_per_block + address];
  }
  return store_->sparse[block].get(address);
}

void BlockMemory::set_cell(std::uint32_t block, std::uint32_t address,
                           std::int32_t v) {
  if (storage_ == StorageKind::dense) {
    std::int32_t& c = store_->dense[block * store_->cells_per_block + address];
    if (c == kEmpty) store_->dense_used[block]++;
    c = v;
  } else {
    store_->sparse[block].set(address, v);
  }
}

std::uint64_t BlockMemory::occupied_cells(std::uint32_t block) const {
  if (storage_ == StorageKind::dense) return store_->dense_used[block];
  return store_->sparse[block].size();
}

void BlockMemory::check_bank(const DiffuserBank& bank) const {
  if (bank.blocks() != blocks_ || bank.depth_bits() != depth_bits_ ||
      bank.dimension() != dimension_) {
    throw DimensionError("diffuser bank geometry does not match the memory");
  }
  if (bank.master_seed() != master_seed_) {
    throw DimensionError("diffuser bank seed does not match the memory");
  }
}

std::int32_t BlockMemory::learn(const Hypervector& hv, std::string_view label,
                                const DiffuserBank& bank, RescueBuffer* rescue) {
  if (finalized_) throw StateError("learn on a finalized memory");
  check_bank(bank);
  bank.check_dimension(hv);
  std::int32_t tid = labels_.intern(label);

  std::uint64_t fp = 0x243f6a8885a308d3ULL;
  for (std::uint64_t w : hv.words()) fp = hash_pair(fp, w);
  if (!learned_.insert(hash_pair(fp, static_cast<std::uint64_t>(tid))).second) {
    return tid;
  }

  std::vector<std::uint32_t> addrs = bank.addresses(hv);
  ++stats_.learns;
  for (std::uint32_t b = 0; b < blocks_; ++b) {
    std::uint32_t a = addrs[b];
    std::int32_t v = cell(b, a);
    ++stats_.write_attempts;
    if (v == kEmpty) {
      set_cell(b, a, tid);
    } else if (v == tid) {
      // already holds this tid
    } else if (v >= 0) {
      ++stats_.flagged_attempts;
      ++stats_.flagged_cells;
      if (rescue != nullptr) {
        auto idx = static_cast<std::uint32_t>(buckets_.size());
        buckets_.push_back({v, tid});
        set_cell(b, a, bucket_ref(idx));
      } else {
        set_cell(b, a, kCollision);
      }
    } else if (is_bucket_ref(v)) {
      auto& bucket = buckets_[bucket_index(v)];
      if (std::find(bucket.begin(), bucket.end(), tid) == bucket.end()) {
        bucket.push_back(tid);
        ++stats_.flagged_attempts;
      }
    } else {
      ++stats_.flagged_attempts;
    }
  }
  if (rescue != nullptr) rescue->append(addrs, bank.segments(hv), tid);
  return tid;
}

void BlockMemory::read_votes(const Hypervector& hv, const DiffuserBank& bank,
                             std::span<std::int32_t> out) const {
  check_bank(bank);
  std::uint32_t small[1024];
  std::vector<std::uint32_t> big;
  std::span<std::uint32_t> addrs(small, blocks_);
  if (blocks_ > 1024) {
    big.resize(blocks_);
    addrs = big;
  }
  bank.addresses(hv, addrs);
  if (out.size() != blocks_) throw DimensionError("vote buffer must hold B cells");
  for (std::uint32_t b = 0; b < blocks_; ++b) out[b] = cell(b, addrs[b]);
}

std::vector<std::int32_t> BlockMemory::read_votes(const Hypervector& hv,
                                                  const DiffuserBank& bank) const {
  std::vector<std::int32_t> out(blocks_);
  read_votes(hv, bank, out);
  return out;
}

VoteResult BlockMemory::vote(const Hypervector& hv, const DiffuserBank& bank) const {
  return majority_vote(read_votes(hv, bank));
}

void BlockMemory::mark_collided(std::uint32_t block, std::uint32_t address) {
  if (block >= blocks_ || address >= store_->cells_per_block) {
    throw DimensionError("mark_collided: cell out of range");
  }
  set_cell(block, address, kCollision);
}

// ---------------------------------------------------------------------------

namespace {
constexpr char kMagic[9] = "HDCAMMEM";
constexpr std::uint32_t kVersion = 1;
}  // namespace

void BlockMemory::save(const std::filesystem::path& path) const {
  const std::string p = path.string();
  auto os = binio::open_out(p);
  binio::put_bytes(os, kMagic, 8);
  binio::put_u32(os, kVersion);
  binio::put_u32(os, blocks_);
  binio::put_u32(os, depth_bits_);
  binio::put_u64(os, dimension_);
  binio::put_u64(os, master_seed_);
  binio::put_u64(os, labels_.size());
  binio::put_u32(os, static_cast<std::uint32_t>(storage_));
  binio::put_u64(os, stats_.learns);
  binio::put_u64(os, stats_.write_attempts);
  binio::put_u64(os, stats_.flagged_attempts);
  binio::put_u64(os, stats_.flagged_cells);
  for (const auto& l : labels_.labels()) binio::put_string(os, l);
  binio::put_u64(os, buckets_.size());
  for (const auto& bucket : buckets_) {
    binio::put_u32(os, static_cast<std::uint32_t>(bucket.size()));
    for (std::int32_t t : bucket) binio::put_i32(os, t);
  }
  if (storage_ == StorageKind::dense) {
    for (std::int32_t v : store_->dense) binio::put_i32(os, v);
  } else {
    for (const auto& block : store_->sparse) {
      auto slots = block.sorted();
      binio::put_u64(os, slots.size());
      for (const Slot& s : slots) {
        binio::put_u32(os, s.address);
        binio::put_i32(os, s.value);
      }
    }
  }
  binio::finish(os, p);
}

BlockMemory BlockMemory::load(const std::filesystem::path& path) {
  auto is = binio::open_in(path.string());
  binio::expect_magic(is, kMagic);
  if (binio::get_u32(is) != kVersion) throw FormatError("unsupported snapshot version");
  std::uint32_t blocks = binio::get_u32(is);
  std::uint32_t depth = binio::get_u32(is);
  std::uint64_t dimension = binio::get_u64(is);
  std::uint64_t seed = binio::get_u64(is);
  std::uint64_t nlabels = binio::get_u64(is);
  std::uint32_t storage = binio::get_u32(is);
  if (storage > 1) throw FormatError("bad storage kind in snapshot");
  BlockMemory mem(blocks, depth, dimension, seed, static_cast<StorageKind>(storage));
  mem.stats_.learns = binio::get_u64(is);
  mem.stats_.write_attempts = binio::get_u64(is);
  mem.stats_.flagged_attempts = binio::get_u64(is);
  mem.stats_.flagged_cells = binio::get_u64(is);
  for (std::uint64_t i = 0; i < nlabels; ++i) mem.labels_.intern(binio::get_string(is));
  std::uint64_t nbuckets = binio::get_u64(is);
  mem.buckets_.resize(nbuckets);
  for (auto& bucket : mem.buckets_) {
    bucket.resize(binio::get_u32(is));
    for (auto& t : bucket) t = binio::get_i32(is);
  }
  if (mem.storage_ == StorageKind::dense) {
    for (std::uint32_t b = 0; b < blocks; ++b) {
      for (std::uint64_t a = 0; a < mem.store_->cells_per_block; ++a) {
        std::int32_t v = binio::get_i32(is);
        if (v != kEmpty) mem.set_cell(b, static_cast<std::uint32_t>(a), v);
      }
    }
  } else {
    for (std::uint32_t b = 0; b < blocks; ++b) {
      std::uint64_t n = binio::get_u64(is);
      for (std::uint64_t i = 0; i < n; ++i) {
        std::uint32_t a = binio::get_u32(is);
        std::int32_t v = binio::get_i32(is);
        if (a >= mem.store_->cells_per_block) throw FormatError("cell address out of range");
        mem.set_cell(b, a, v);
      }
    }
  }
  mem.finalized_ = true;
  return mem;
}

}  // namespace hdcam

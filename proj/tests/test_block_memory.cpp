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

#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <vector>

#include "hdcam/block_memory.hpp"
#include "hdcam/error.hpp"
#include "hdcam/galois.hpp"
#include "hdcam/rescue.hpp"
#include "test_util.hpp"

namespace hdcam {
namespace {

using testing::random_hv;
using testing::TempDir;

// Brute force: count every non-negative tid, highest count wins, lowest tid on ties.
VoteResult brute_vote(const std::vector<std::int32_t>& votes) {
  std::map<std::int32_t, std::uint32_t> counts;
  std::uint32_t dc = 0;
  for (auto v : votes) {
    if (v >= 0) ++counts[v];
    else ++dc;
  }
  VoteResult r;
  r.blocks = static_cast<std::uint32_t>(votes.size());
  r.dont_care_blocks = dc;
  std::uint32_t total = 0;
  for (auto [tid, c] : counts) {
    total += c;
    if (!r.winner || c > r.winner_votes) {
      r.winner = tid;
      r.winner_votes = c;
    }
  }
  r.losing_votes = total - r.winner_votes;
  r.cr1 = votes.empty() ? 0.0 : static_cast<double>(r.winner_votes) / votes.size();
  return r;
}

TEST(MajorityVote, Examples) {
  std::vector<std::int32_t> all7(128, 7);
  auto r = majority_vote(all7);
  EXPECT_EQ(r.winner, 7);
  EXPECT_EQ(r.winner_votes, 128u);
  EXPECT_EQ(r.cr1, 1.0);

  all7[5] = kCollision;
  r = majority_vote(all7);
  EXPECT_EQ(r.winner, 7);
  EXPECT_EQ(r.winner_votes, 127u);
  EXPECT_EQ(r.dont_care_blocks, 1u);
  EXPECT_DOUBLE_EQ(r.cr1, 127.0 / 128.0);

  std::vector<std::int32_t> mixed(68, 7);
  for (int i = 0; i < 60; ++i) mixed.push_back(1000 + i);
  EXPECT_EQ(majority_vote(mixed).winner, 7);

  std::vector<std::int32_t> none(16, kEmpty);
  none[3] = kCollision;
  none[4] = bucket_ref(0);
  r = majority_vote(none);
  EXPECT_FALSE(r.winner.has_value());
  EXPECT_EQ(r.dont_care_blocks, 16u);
  EXPECT_EQ(r.cr1, 0.0);

  std::vector<std::int32_t> tie{9, 9, 4, 4, 5};
  EXPECT_EQ(majority_vote(tie).winner, 4);
}

TEST(MajorityVote, MatchesBruteForce) {
  SplitMix64 rng(1);
  for (int trial = 0; trial < 3000; ++trial) {
    std::size_t n = 1 + rng.below(200);
    std::int32_t labels = 1 + static_cast<std::int32_t>(rng.below(10));
    std::vector<std::int32_t> votes(n);
    for (auto& v : votes) {
      switch (rng.below(6)) {
        case 0: v = kEmpty; break;
        case 1: v = kCollision; break;
        case 2: v = bucket_ref(static_cast<std::uint32_t>(rng.below(5))); break;
        default: v = static_cast<std::int32_t>(rng.below(labels));
      }
    }
    auto got = majority_vote(votes);
    auto want = brute_vote(votes);
    ASSERT_EQ(got.winner, want.winner);
    ASSERT_EQ(got.winner_votes, want.winner_votes);
    ASSERT_EQ(got.losing_votes, want.losing_votes);
    ASSERT_EQ(got.dont_care_blocks, want.dont_care_blocks);
    ASSERT_DOUBLE_EQ(got.cr1, want.cr1);
  }
}

TEST(MajorityVote, NoiseRobustness) {
  SplitMix64 rng(2);
  int correct = 0;
  const int trials = 3000;
  for (int t = 0; t < trials; ++t) {
    std::int32_t truth = static_cast<std::int32_t>(rng.below(10000));
    std::vector<std::int32_t> votes(128, truth);
    // Corrupt 60 distinct blocks: shuffle the first 60 positions of a permutation.
    std::vector<std::size_t> pos(128);
    for (std::size_t i = 0; i < 128; ++i) pos[i] = i;
    for (std::size_t i = 0; i < 60; ++i) {
      std::swap(pos[i], pos[i + rng.below(128 - i)]);
      votes[pos[i]] = static_cast<std::int32_t>(rng.below(10000));
    }
    correct += majority_vote(votes).winner == truth;
  }
  EXPECT_EQ(correct, trials);
}

TEST(LabelTable, InternsStably) {
  LabelTable t;
  EXPECT_EQ(t.intern("a"), 0);
  EXPECT_EQ(t.intern("b"), 1);
  EXPECT_EQ(t.intern("a"), 0);
  EXPECT_EQ(t.find("b"), 1);
  EXPECT_FALSE(t.find("c").has_value());
  EXPECT_EQ(t.label(1), "b");
}

struct Fixture {
  std::uint32_t B;
  unsigned m;
  std::size_t q;
  DiffuserBank bank;
  Fixture(std::uint32_t b, unsigned depth, std::size_t seg, std::uint64_t seed = 42)
      : B(b), m(depth), q(seg), bank(seed, b, depth, seg) {}
  std::size_t L() const { return B * q; }
};

TEST(BlockMemory, FirstLearnAndRead) {
  Fixture f(128, 20, 16);
  BlockMemory mem(f.B, f.m, f.L(), 42);
  SplitMix64 rng(3);
  Hypervector hv = random_hv(rng, f.L());
  EXPECT_EQ(mem.learn(hv, "x", f.bank), 0);
  EXPECT_EQ(mem.stats().flagged_attempts, 0u);
  EXPECT_EQ(mem.stats().write_attempts, 128u);
  auto votes = mem.read_votes(hv, f.bank);
  for (auto v : votes) EXPECT_EQ(v, 0);
  auto r = mem.vote(hv, f.bank);
  EXPECT_EQ(r.winner, 0);
  EXPECT_EQ(r.cr1, 1.0);
}

TEST(BlockMemory, RelearnIsIdempotent) {
  Fixture f(32, 16, 32);
  BlockMemory mem(f.B, f.m, f.L(), 42);
  SplitMix64 rng(4);
  Hypervector hv = random_hv(rng, f.L());
  mem.learn(hv, "x", f.bank);
  CollisionStats before = mem.stats();
  mem.learn(hv, "x", f.bank);
  EXPECT_EQ(mem.stats().learns, before.learns);
  EXPECT_EQ(mem.stats().flagged_attempts, 0u);
  // The same key under a new label is a genuine overwrite.
  mem.learn(hv, "y", f.bank);
  EXPECT_EQ(mem.stats().flagged_cells, 32u);
  EXPECT_FALSE(mem.vote(hv, f.bank).winner.has_value());
}

TEST(BlockMemory, SingleBlockCollision) {
  Fixture f(8, 12, 64);
  BlockMemory mem(f.B, f.m, f.L(), 42);
  SplitMix64 rng(5);
  Hypervector a = random_hv(rng, f.L());
  auto aa = f.bank.addresses(a);
  Hypervector b;
  for (;;) {
    b = random_hv(rng, f.L());
    auto ba = f.bank.addresses(b);
    bool ok = ba[3] == aa[3];
    for (std::uint32_t k = 0; k < f.B && ok; ++k) ok = k == 3 || ba[k] != aa[k];
    if (ok) break;
  }
  mem.learn(a, "a", f.bank);
  mem.learn(b, "b", f.bank);
  EXPECT_EQ(mem.stats().flagged_cells, 1u);
  EXPECT_EQ(mem.stats().flagged_attempts, 1u);
  EXPECT_EQ(mem.cell(3, aa[3]), kCollision);
  auto votes = mem.read_votes(b, f.bank);
  EXPECT_EQ(std::count(votes.begin(), votes.end(), 1), 7);
  EXPECT_EQ(votes[3], kCollision);
  auto r = mem.vote(a, f.bank);
  EXPECT_EQ(r.winner, 0);
  EXPECT_DOUBLE_EQ(r.cr1, 7.0 / 8.0);
  EXPECT_DOUBLE_EQ(mem.stats().location_rate(), 1.0 / (8.0 * 4096.0));
  EXPECT_DOUBLE_EQ(mem.stats().count_rate(), 1.0 / 16.0);
}

TEST(BlockMemory, CollisionWithRescueBufferMakesBucket) {
  Fixture f(4, 4, 64);
  BlockMemory mem(f.B, f.m, f.L(), 42);
  RescueBuffer buf(f.B, f.bank.segment_bytes());
  SplitMix64 rng(6);
  for (int i = 0; i < 40; ++i) mem.learn(random_hv(rng, f.L()), "n" + std::to_string(i), f.bank, &buf);
  ASSERT_GT(mem.bucket_count(), 0u);
  std::size_t refs = 0;
  for (std::uint32_t b = 0; b < f.B; ++b) {
    for (std::uint32_t a = 0; a < 16; ++a) {
      std::int32_t v = mem.cell(b, a);
      EXPECT_NE(v, kCollision);
      if (is_bucket_ref(v)) {
        ++refs;
        EXPECT_GE(mem.bucket(bucket_index(v)).size(), 2u);
      }
    }
  }
  EXPECT_EQ(refs, mem.bucket_count());
  EXPECT_EQ(mem.stats().flagged_cells, refs);
  EXPECT_EQ(buf.size(), 40u);
}

TEST(BlockMemory, UnlearnedProbesMostlyEmptyAtDepth27) {
  Fixture f(128, 27, 100);
  BlockMemory mem(f.B, f.m, f.L(), 42);
  EXPECT_EQ(mem.storage(), StorageKind::sparse);
  SplitMix64 rng(7);
  for (int i = 0; i < 2000; ++i) mem.learn(random_hv(rng, f.L()), "n" + std::to_string(i), f.bank);
  std::size_t non_empty = 0;
  for (int p = 0; p < 1000; ++p) {
    for (auto v : mem.read_votes(random_hv(rng, f.L()), f.bank)) non_empty += v != kEmpty;
  }
  EXPECT_LE(non_empty, 5u);
}

TEST(BlockMemory, CountRateFollowsBirthdayBound) {
  // Same load factor as 470k keys in 2^27 cells, scaled to 2^24.
  Fixture f(32, 24, 100);
  const std::size_t keys = 58720;
  BlockMemory mem(f.B, f.m, f.L(), 42);
  SplitMix64 rng(8);
  for (std::size_t i = 0; i < keys; ++i) {
    mem.learn(random_hv(rng, f.L()), "n" + std::to_string(i), f.bank);
  }
  const double cells = 16777216.0;
  const double birthday = (keys - 1) / (2.0 * cells);
  EXPECT_NEAR(mem.stats().count_rate(), birthday, 0.1 * birthday);
  EXPECT_GT(mem.stats().count_rate(), 0.001438 / 10);
  EXPECT_LT(mem.stats().count_rate(), 0.001438 * 10);
  EXPECT_LE(mem.stats().location_rate(), mem.stats().count_rate());
}

TEST(BlockMemory, VoteDecreasesWithDistance) {
  Fixture f(128, 20, 100);
  BlockMemory mem(f.B, f.m, f.L(), 42);
  SplitMix64 rng(9);
  std::vector<Hypervector> keys;
  for (int i = 0; i < 50; ++i) {
    keys.push_back(random_hv(rng, f.L()));
    mem.learn(keys.back(), "n" + std::to_string(i), f.bank);
  }
  double prev = 1e9;
  for (std::size_t flips : {0, 1, 10, 50, 100, 200, 400, 1000}) {
    double total = 0;
    for (const auto& k : keys) {
      Hypervector probe = k;
      for (std::size_t j = 0; j < flips; ++j) probe.flip_bit(rng.below(f.L()));
      auto r = mem.vote(probe, f.bank);
      total += r.winner == mem.vote(k, f.bank).winner ? r.winner_votes : 0;
    }
    double mean = total / keys.size();
    EXPECT_LE(mean, prev) << flips;
    prev = mean;
  }
  EXPECT_LT(prev, 5.0);
}

TEST(BlockMemory, FinalizedRejectsLearn) {
  Fixture f(8, 10, 8);
  BlockMemory mem(f.B, f.m, f.L(), 42);
  mem.finalize();
  SplitMix64 rng(10);
  EXPECT_THROW(mem.learn(random_hv(rng, f.L()), "a", f.bank), StateError);
}

TEST(BlockMemory, RejectsMismatchedBank) {
  Fixture f(8, 10, 8);
  BlockMemory mem(f.B, f.m + 1, f.L(), 42);
  SplitMix64 rng(11);
  EXPECT_THROW(mem.learn(random_hv(rng, f.L()), "a", f.bank), Error);
  DiffuserBank other(43, f.B, f.m, f.q);
  BlockMemory mem2(f.B, f.m, f.L(), 42);
  EXPECT_THROW(mem2.learn(random_hv(rng, f.L()), "a", other), Error);
}

TEST(BlockMemory, MarkCollidedTurnsCellIntoDontCare) {
  Fixture f(16, 12, 8);
  BlockMemory mem(f.B, f.m, f.L(), 42);
  SplitMix64 rng(12);
  Hypervector hv = random_hv(rng, f.L());
  mem.learn(hv, "a", f.bank);
  auto addrs = f.bank.addresses(hv);
  mem.mark_collided(2, addrs[2]);
  mem.mark_collided(9, addrs[9]);
  auto r = mem.vote(hv, f.bank);
  EXPECT_EQ(r.winner_votes, 14u);
  EXPECT_EQ(r.dont_care_blocks, 2u);
  EXPECT_EQ(mem.stats().flagged_cells, 0u);
}

void expect_same_memory(const BlockMemory& a, const BlockMemory& b, std::uint32_t depth_cells) {
  ASSERT_EQ(a.blocks(), b.blocks());
  EXPECT_EQ(a.depth_bits(), b.depth_bits());
  EXPECT_EQ(a.dimension(), b.dimension());
  EXPECT_EQ(a.master_seed(), b.master_seed());
  EXPECT_EQ(a.labels().labels(), b.labels().labels());
  EXPECT_EQ(a.stats().flagged_cells, b.stats().flagged_cells);
  EXPECT_EQ(a.stats().write_attempts, b.stats().write_attempts);
  EXPECT_EQ(a.bucket_count(), b.bucket_count());
  for (std::uint32_t blk = 0; blk < a.blocks(); ++blk) {
    EXPECT_EQ(a.occupied_cells(blk), b.occupied_cells(blk));
    for (std::uint32_t c = 0; c < depth_cells; ++c) ASSERT_EQ(a.cell(blk, c), b.cell(blk, c));
  }
  EXPECT_TRUE(b.finalized());
}

TEST(BlockMemory, SnapshotRoundTripDenseAndSparse) {
  TempDir dir("mem");
  for (StorageKind kind : {StorageKind::dense, StorageKind::sparse}) {
    Fixture f(8, 10, 32);
    BlockMemory mem(f.B, f.m, f.L(), 42, kind);
    RescueBuffer buf(f.B, f.bank.segment_bytes());
    SplitMix64 rng(13);
    for (int i = 0; i < 300; ++i) {
      mem.learn(random_hv(rng, f.L()), "n" + std::to_string(i % 200), f.bank, i % 2 ? &buf : nullptr);
    }
    mem.finalize();
    std::string path = dir.file("snap.bin");
    mem.save(path);
    BlockMemory back = BlockMemory::load(path);
    EXPECT_EQ(back.storage(), kind);
    expect_same_memory(mem, back, 1024);
  }
}

TEST(BlockMemory, LoadRejectsGarbage) {
  TempDir dir("memgarbage");
  {
    std::ofstream os(dir.file("bad.bin"), std::ios::binary);
    os << "not a snapshot";
  }
  EXPECT_THROW(BlockMemory::load(dir.file("bad.bin")), Error);
  EXPECT_THROW(BlockMemory::load(dir.file("missing.bin")), IoError);
}

}  // namespace
}  // namespace hdcam

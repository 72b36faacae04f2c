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

#include <cmath>
#include <vector>

#include "hdcam/codebook.hpp"
#include "hdcam/error.hpp"
#include "hdcam/hypervector.hpp"
#include "test_util.hpp"

namespace hdcam {
namespace {

using testing::random_hv;
using testing::TempDir;

// Plain bool-vector model used as an oracle for the packed operations.
std::vector<bool> unpack(const Hypervector& v) {
  std::vector<bool> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v.bit(i);
  return out;
}

std::vector<bool> model_bind(const std::vector<bool>& a, const std::vector<bool>& b) {
  const std::size_t n = a.size();
  std::vector<bool> out(n);
  // rotl1: bit i of the rotated vector is bit i-1 of the original.
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] != b[(i + n - 1) % n];
  return out;
}

const std::size_t kLengths[] = {8, 64, 72, 100 * 8, 10000, 12800, 10008};

TEST(Hypervector, PaddingBitsStayZero) {
  SplitMix64 rng(1);
  for (std::size_t len : {8, 72, 10000, 10008}) {
    Hypervector v = random_hv(rng, len);
    std::size_t pop = 0;
    for (std::size_t i = 0; i < len; ++i) pop += v.bit(i);
    EXPECT_EQ(v.popcount(), pop);
    EXPECT_EQ((~v).popcount(), len - pop);
    EXPECT_EQ(v.rotl1().popcount(), pop);
    EXPECT_EQ(v.rotr1().popcount(), pop);
  }
}

TEST(Hypervector, BytesRoundTripLsbFirst) {
  Hypervector v(16);
  v.set_bit(0, true);
  v.set_bit(9, true);
  auto bytes = v.to_bytes();
  ASSERT_EQ(bytes.size(), 2u);
  EXPECT_EQ(bytes[0], 0x01);
  EXPECT_EQ(bytes[1], 0x02);
  SplitMix64 rng(2);
  for (std::size_t len : kLengths) {
    Hypervector r = random_hv(rng, len);
    EXPECT_EQ(Hypervector::from_bytes(r.to_bytes(), len), r);
  }
}

TEST(Hypervector, ExtractBitsMatchesBitLoop) {
  SplitMix64 rng(3);
  Hypervector v = random_hv(rng, 12800);
  for (int trial = 0; trial < 500; ++trial) {
    std::size_t count = 1 + rng.below(200);
    std::size_t first = rng.below(12800 - count);
    std::vector<std::uint8_t> got((count + 7) / 8, 0xAA);
    v.extract_bits(first, count, got.data());
    std::vector<std::uint8_t> want((count + 7) / 8, 0);
    for (std::size_t i = 0; i < count; ++i) {
      if (v.bit(first + i)) want[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
    }
    ASSERT_EQ(got, want) << "first=" << first << " count=" << count;
  }
}

TEST(Hypervector, BindMatchesModel) {
  SplitMix64 rng(4);
  for (std::size_t len : kLengths) {
    Hypervector a = random_hv(rng, len);
    Hypervector b = random_hv(rng, len);
    auto got = unpack(bind(a, b));
    EXPECT_EQ(got, model_bind(unpack(a), unpack(b))) << len;
  }
}

TEST(Hypervector, BindRecoveryProperty) {
  SplitMix64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t len = 8 * (1 + rng.below(1500));
    Hypervector a = random_hv(rng, len);
    Hypervector b = random_hv(rng, len);
    Hypervector c = bind(a, b);
    // Rebinding with the rotated operand recovers the first operand exactly.
    EXPECT_EQ(c ^ b.rotl1(), a);
    EXPECT_EQ(unbind_role(c, a), b);
    EXPECT_EQ(rng.below(2) ? a.rotl1().rotr1() : a.rotr1().rotl1(), a);
  }
}

TEST(Hypervector, BindIsAsymmetric) {
  SplitMix64 rng(6);
  Hypervector a = random_hv(rng, 10000);
  Hypervector b = random_hv(rng, 10000);
  EXPECT_NE(bind(a, b), bind(b, a));
}

TEST(Hypervector, DimensionMismatchThrows) {
  Hypervector a(64), b(72);
  EXPECT_THROW(bind(a, b), DimensionError);
  EXPECT_THROW(hamming(a, b), DimensionError);
  EXPECT_THROW(a ^ b, DimensionError);
}

TEST(Hypervector, SimilaritySymmetricAndReflexive) {
  SplitMix64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t len = 8 * (1 + rng.below(2000));
    Hypervector a = random_hv(rng, len);
    Hypervector b = random_hv(rng, len);
    EXPECT_EQ(similarity(a, b), similarity(b, a));
    EXPECT_EQ(similarity(a, a), 1.0);
    std::size_t d = 0;
    for (std::size_t i = 0; i < len; ++i) d += a.bit(i) != b.bit(i);
    EXPECT_EQ(hamming(a, b).distance, d);
  }
}

TEST(Hypervector, RandomPairsConcentrateAtHalf) {
  const std::size_t len = 10000;
  SplitMix64 rng(8);
  std::vector<Hypervector> vs;
  for (int i = 0; i < 60; ++i) vs.push_back(random_hv(rng, len));
  const double bound = 5.0 / (2.0 * std::sqrt(static_cast<double>(len)));
  std::size_t pairs = 0, inside = 0;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    for (std::size_t j = i + 1; j < vs.size(); ++j) {
      ++pairs;
      inside += std::abs(similarity(vs[i], vs[j]) - 0.5) < bound;
    }
  }
  EXPECT_GE(static_cast<double>(inside), 0.99 * static_cast<double>(pairs));
}

TEST(Hypervector, BundleMatchesBruteForceMajority) {
  SplitMix64 rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    std::size_t len = 8 * (1 + rng.below(64));
    std::size_t k = 1 + rng.below(8);
    std::vector<Hypervector> vs;
    for (std::size_t i = 0; i < k; ++i) vs.push_back(random_hv(rng, len));
    Hypervector tie = random_hv(rng, len);
    Hypervector got = bundle(vs, tie);
    for (std::size_t i = 0; i < len; ++i) {
      std::size_t ones = 0;
      for (const auto& v : vs) ones += v.bit(i);
      bool want = 2 * ones > k ? true : 2 * ones < k ? false : tie.bit(i);
      ASSERT_EQ(got.bit(i), want);
    }
  }
}

TEST(Hypervector, BundleOfOneIsIdentity) {
  SplitMix64 rng(10);
  Hypervector a = random_hv(rng, 1000);
  Hypervector t = random_hv(rng, 1000);
  std::vector<Hypervector> one{a};
  EXPECT_EQ(bundle(one, t), a);
  std::vector<Hypervector> none;
  EXPECT_THROW(bundle(none, t), EmptyInputError);
}

// Expected similarity of a majority bundle to one member.  Odd k has no
// ties; for even k the tiebreak vector is an independent fair coin.
double bundle_member_expectation(std::size_t k) {
  // P(output bit equals member bit) = P(majority of others agrees or ties broken right).
  const std::size_t others = k - 1;
  double p = 0.0;
  for (std::size_t j = 0; j <= others; ++j) {
    double pj = std::exp(std::lgamma(others + 1.0) - std::lgamma(j + 1.0) -
                         std::lgamma(others - j + 1.0) - others * std::log(2.0));
    std::size_t agree = j + 1;  // member itself plus j agreeing others
    if (2 * agree > k) p += pj;
    else if (2 * agree == k) p += 0.5 * pj;
  }
  return p;
}

TEST(Hypervector, BundleSignalDecreasesAndMatchesBinomial) {
  const std::size_t len = 10000;
  SplitMix64 rng(11);
  Hypervector tie = random_hv(rng, len);
  double prev = 1.1;
  for (std::size_t k : {1, 3, 5, 7, 9, 15, 21, 31}) {
    std::vector<Hypervector> vs;
    for (std::size_t i = 0; i < k; ++i) vs.push_back(random_hv(rng, len));
    Hypervector b = bundle(vs, tie);
    double mean = 0.0;
    for (const auto& v : vs) mean += similarity(b, v);
    mean /= static_cast<double>(k);
    double expect = bundle_member_expectation(k);
    double sigma = std::sqrt(expect * (1 - expect) / static_cast<double>(len));
    EXPECT_NEAR(mean, expect, 3.0 * sigma + 1e-12) << "k=" << k;
    EXPECT_LT(mean, prev);
    prev = mean;
  }
}

TEST(Hypervector, TokensAreDeterministicAndIndependent) {
  EXPECT_EQ(generate_token("calculus", 10000, 42), generate_token("calculus", 10000, 42));
  double s_name = similarity(generate_token("a", 10000, 42), generate_token("b", 10000, 42));
  double s_seed = similarity(generate_token("a", 10000, 42), generate_token("a", 10000, 43));
  EXPECT_GE(s_name, 0.45);
  EXPECT_LE(s_name, 0.55);
  EXPECT_GE(s_seed, 0.45);
  EXPECT_LE(s_seed, 0.55);
  std::size_t inside = 0;
  for (int i = 0; i < 100; ++i) {
    double s = similarity(generate_token("t" + std::to_string(i), 10000, 42),
                          generate_token("u" + std::to_string(i), 10000, 42));
    inside += s >= 0.45 && s <= 0.55;
  }
  EXPECT_EQ(inside, 100u);
  EXPECT_THROW(generate_token("a", 0, 1), DimensionError);
  EXPECT_THROW(generate_token("a", 12, 1), DimensionError);
}

TEST(Codebook, CachesAndRoundTrips) {
  TempDir dir("codebook");
  TokenCodebook cb(42, 1024);
  const Hypervector& a = cb.get("alpha");
  EXPECT_EQ(&a, &cb.get("alpha"));
  EXPECT_EQ(a, generate_token("alpha", 1024, 42));
  cb.get("beta");
  cb.tiebreak();
  EXPECT_EQ(cb.size(), 3u);
  cb.save(dir.file("cb.bin"));
  auto loaded = TokenCodebook::load(dir.file("cb.bin"));
  EXPECT_EQ(loaded->size(), 3u);
  EXPECT_TRUE(loaded->contains("beta"));
  EXPECT_EQ(loaded->get("alpha"), a);
  EXPECT_EQ(loaded->seed(), 42u);
}

}  // namespace
}  // namespace hdcam

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

#include "hdcam/galois.hpp"

#include <bit>
#include <string>

#include "hdcam/error.hpp"
#include "hdcam/hash.hpp"

namespace hdcam {

FeedbackPolynomial sample_polynomial(std::uint64_t rng_state) {
  SplitMix64 rng(rng_state);
  return FeedbackPolynomial::from_draw(rng.next());
}

BlockDiffuser::BlockDiffuser(FeedbackPolynomial poly, std::uint64_t seed,
                             unsigned depth_bits, std::size_t segment_bits)
    : poly_(FeedbackPolynomial::from_draw(poly.coeffs)),
      seed_(seed),
      depth_bits_(depth_bits),
      segment_bits_(segment_bits),
      nbytes_((segment_bits + 7) / 8) {
  if (seed == 0) throw DimensionError("diffuser seed must be nonzero");
  if (depth_bits < 1 || depth_bits > 32) {
    throw DimensionError("depth exponent must be in [1, 32], got " +
                         std::to_string(depth_bits));
  }
  if (segment_bits == 0) throw DimensionError("segment length must be positive");
  mask_ = depth_bits == 32 ? 0xFFFFFFFFu : ((1u << depth_bits) - 1u);
  for (std::uint64_t i = 0; i < 256; ++i) {
    std::uint64_t s = i;
    for (int k = 0; k < 8; ++k) s = (s & 1) ? (s >> 1) ^ poly_.coeffs : s >> 1;
    table_[i] = s;
  }
}

std::uint32_t BlockDiffuser::diffuse(std::span<const std::uint8_t> segment) const {
  if (segment.size() != nbytes_) {
    throw DimensionError("diffuse: segment must be " + std::to_string(nbytes_) +
                         " bytes, got " + std::to_string(segment.size()));
  }
  return diffuse_unchecked(segment.data());
}

DiffuserBank::DiffuserBank(std::uint64_t master_seed, std::uint32_t blocks,
                           unsigned depth_bits, std::size_t segment_bits)
    : master_seed_(master_seed), depth_bits_(depth_bits), segment_bits_(segment_bits) {
  if (blocks == 0) throw DimensionError("block count must be positive");
  diffusers_.reserve(blocks);
  for (std::uint64_t b = 0; b < blocks; ++b) {
    FeedbackPolynomial poly = sample_polynomial(hash_pair(master_seed, 2 * b));
    std::uint64_t seed = mix64(hash_pair(master_seed, 2 * b + 1));
    if (seed == 0) seed = kGolden;
    diffusers_.emplace_back(poly, seed, depth_bits, segment_bits);
  }
}

void DiffuserBank::check_dimension(const Hypervector& hv) const {
  if (hv.size() != dimension()) {
    throw DimensionError("hypervector length " + std::to_string(hv.size()) +
                         " does not match B*q = " + std::to_string(dimension()));
  }
}

void DiffuserBank::segment(const Hypervector& hv, std::size_t b,
                           std::uint8_t* out) const {
  hv.extract_bits(b * segment_bits_, segment_bits_, out);
}

std::vector<std::uint8_t> DiffuserBank::segments(const Hypervector& hv) const {
  check_dimension(hv);
  std::size_t nb = segment_bytes();
  std::vector<std::uint8_t> out(nb * diffusers_.size());
  for (std::size_t b = 0; b < diffusers_.size(); ++b) segment(hv, b, out.data() + b * nb);
  return out;
}

void DiffuserBank::addresses(const Hypervector& hv, std::span<std::uint32_t> out) const {
  check_dimension(hv);
  if (out.size() != diffusers_.size()) {
    throw DimensionError("address buffer must hold one entry per block");
  }
  std::uint8_t buf[512];
  std::vector<std::uint8_t> heap;
  std::uint8_t* seg = buf;
  if (segment_bytes() > sizeof(buf)) {
    heap.resize(segment_bytes());
    seg = heap.data();
  }
  for (std::size_t b = 0; b < diffusers_.size(); ++b) {
    segment(hv, b, seg);
    out[b] = diffusers_[b].diffuse_unchecked(seg);
  }
}

std::vector<std::uint32_t> DiffuserBank::addresses(const Hypervector& hv) const {
  std::vector<std::uint32_t> out(diffusers_.size());
  addresses(hv, out);
  return out;
}

double avalanche_stats(const BlockDiffuser& diffuser, std::size_t trials,
                       std::uint64_t rng_seed, std::size_t flips) {
  if (trials == 0) throw EmptyInputError("avalanche_stats: trials must be positive");
  const std::size_t q = diffuser.segment_bits();
  if (flips > q) throw DimensionError("avalanche_stats: more flips than segment bits");
  SplitMix64 rng(rng_seed);
  std::vector<std::uint8_t> a(diffuser.segment_bytes());
  std::vector<std::uint8_t> b(a.size());
  std::vector<std::size_t> picked;
  std::uint64_t changed = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    for (auto& byte : a) byte = static_cast<std::uint8_t>(rng.next());
    if (q % 8 != 0) a.back() &= static_cast<std::uint8_t>((1u << (q % 8)) - 1);
    b = a;
    picked.clear();
    while (picked.size() < flips) {
      std::size_t pos = rng.below(q);
      bool dup = false;
      for (std::size_t p : picked) dup |= (p == pos);
      if (dup) continue;
      picked.push_back(pos);
      b[pos / 8] ^= static_cast<std::uint8_t>(1u << (pos % 8));
    }
    changed += std::popcount(diffuser.diffuse(a) ^ diffuser.diffuse(b));
  }
  return static_cast<double>(changed) /
         (static_cast<double>(trials) * diffuser.depth_bits());
}

AvalancheDiagnostic diagnose_avalanche(const BlockDiffuser& diffuser,
                                       std::size_t trials, std::uint64_t rng_seed) {
  AvalancheDiagnostic d;
  d.mean_flip_fraction = avalanche_stats(diffuser, trials, rng_seed);
  d.flagged = d.mean_flip_fraction < 0.45 || d.mean_flip_fraction > 0.55;
  return d;
}

}  // namespace hdcam

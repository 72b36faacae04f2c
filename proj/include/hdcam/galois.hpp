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

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hdcam/hypervector.hpp"

namespace hdcam {

// Degree-64 feedback polynomial over GF(2). Bit i of coeffs is the x^i
// coefficient; x^64 is implicit and bit 0 is always set.
struct FeedbackPolynomial {
  std::uint64_t coeffs = 1;

  static FeedbackPolynomial from_draw(std::uint64_t draw) {
    return FeedbackPolynomial{draw | 1ULL};
  }

  friend bool operator==(const FeedbackPolynomial&, const FeedbackPolynomial&) = default;
};

FeedbackPolynomial sample_polynomial(std::uint64_t rng_state);

// Right-shifting internal-XOR LFSR that folds a q-bit segment into an m-bit
// address. The byte-at-a-time table is exactly eight single-bit steps, so
// the result matches the bit-serial definition.
class BlockDiffuser {
 public:
  BlockDiffuser(FeedbackPolynomial poly, std::uint64_t seed, unsigned depth_bits,
                std::size_t segment_bits);

  const FeedbackPolynomial& poly() const { return poly_; }
  std::uint64_t seed() const { return seed_; }
  unsigned depth_bits() const { return depth_bits_; }
  std::size_t segment_bits() const { return segment_bits_; }
  std::size_t segment_bytes() const { return (segment_bits_ + 7) / 8; }
  std::uint32_t address_mask() const { return mask_; }

  // Throws DimensionError when segment.size() != segment_bytes().
  std::uint32_t diffuse(std::span<const std::uint8_t> segment) const;

  // Same as diffuse without the length check.
  std::uint32_t diffuse_unchecked(const std::uint8_t* segment) const {
    std::uint64_t state = seed_;
    for (std::size_t i = 0; i < nbytes_; ++i) {
      state = (state >> 8) ^ table_[(state ^ segment[i]) & 0xFF];
    }
    return static_cast<std::uint32_t>(state) & mask_;
  }

 private:
  FeedbackPolynomial poly_;
  std::uint64_t seed_;
  unsigned depth_bits_;
  std::size_t segment_bits_;
  std::size_t nbytes_;
  std::uint32_t mask_;
  std::array<std::uint64_t, 256> table_;
};

// One diffuser per block, derived from (master_seed, B, m) by counter
// hashing. Segment b of a hypervector is bits [b*q, (b+1)*q).
class DiffuserBank {
 public:
  DiffuserBank(std::uint64_t master_seed, std::uint32_t blocks,
               unsigned depth_bits, std::size_t segment_bits);

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint32_t blocks() const { return static_cast<std::uint32_t>(diffusers_.size()); }
  unsigned depth_bits() const { return depth_bits_; }
  std::size_t segment_bits() const { return segment_bits_; }
  std::size_t segment_bytes() const { return (segment_bits_ + 7) / 8; }
  std::size_t dimension() const { return segment_bits_ * diffusers_.size(); }

  const BlockDiffuser& operator[](std::size_t b) const { return diffusers_[b]; }

  // Packed segment b of hv into out (segment_bytes() bytes).
  void segment(const Hypervector& hv, std::size_t b, std::uint8_t* out) const;

  // All B segments back to back (B * segment_bytes() bytes).
  std::vector<std::uint8_t> segments(const Hypervector& hv) const;

  // Addresses for every block; hv.size() must equal dimension().
  void addresses(const Hypervector& hv, std::span<std::uint32_t> out) const;
  std::vector<std::uint32_t> addresses(const Hypervector& hv) const;

  void check_dimension(const Hypervector& hv) const;

 private:
  std::uint64_t master_seed_;
  unsigned depth_bits_;
  std::size_t segment_bits_;
  std::vector<BlockDiffuser> diffusers_;
};

// Mean fraction of address bits that change when `flips` distinct random
// input bits of a random segment are inverted.
double avalanche_stats(const BlockDiffuser& diffuser, std::size_t trials,
                       std::uint64_t rng_seed, std::size_t flips = 1);

struct AvalancheDiagnostic {
  double mean_flip_fraction = 0.0;
  bool flagged = false;  // mean outside [0.45, 0.55]
};

AvalancheDiagnostic diagnose_avalanche(const BlockDiffuser& diffuser,
                                       std::size_t trials, std::uint64_t rng_seed);

}  // namespace hdcam

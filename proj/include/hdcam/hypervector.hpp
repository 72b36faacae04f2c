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
#include <span>
#include <string_view>
#include <vector>

namespace hdcam {

// Binary hypervector of fixed length L. Bit i is addressed as bit (i % 64)
// of word i / 64; the serialized form puts bit i at bit (i % 8) of byte
// i / 8, so both views agree on the LSB-first convention. Bits past L are
// always zero.
class Hypervector {
 public:
  Hypervector() = default;
  explicit Hypervector(std::size_t length);

  static Hypervector from_bytes(std::span<const std::uint8_t> bytes,
                                std::size_t length);
  static Hypervector from_words(std::vector<std::uint64_t> words,
                                std::size_t length);

  std::size_t size() const { return length_; }
  bool empty() const { return length_ == 0; }

  bool bit(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1U; }
  void set_bit(std::size_t i, bool v);
  void flip_bit(std::size_t i) { words_[i >> 6] ^= std::uint64_t{1} << (i & 63); }
  Hypervector flipped(std::size_t i) const;

  std::span<const std::uint64_t> words() const { return words_; }
  std::size_t popcount() const;

  // Packed LSB-first bytes, ceil(L/8) of them.
  std::vector<std::uint8_t> to_bytes() const;

  // Writes bits [first, first + count) into out (ceil(count/8) bytes),
  // LSB-first, zero padded.
  void extract_bits(std::size_t first, std::size_t count,
                    std::uint8_t* out) const;

  Hypervector operator~() const;
  Hypervector operator^(const Hypervector& other) const;

  // Circular shifts by one position: rotl1 moves bit i to i + 1.
  Hypervector rotl1() const;
  Hypervector rotr1() const;

  friend bool operator==(const Hypervector& a, const Hypervector& b) {
    return a.length_ == b.length_ && a.words_ == b.words_;
  }

 private:
  void clear_padding();

  std::size_t length_ = 0;
  std::vector<std::uint64_t> words_;
};

// A XOR rotl1(B). bind(bind(A, B), B) == A.
Hypervector bind(const Hypervector& a, const Hypervector& b);

// Recovers B from bind(A, B) given A: rotr1(C XOR A).
Hypervector unbind_role(const Hypervector& bound, const Hypervector& role);

// Bitwise majority; exact ties copy the tiebreak bit.
Hypervector bundle(std::span<const Hypervector> vs, const Hypervector& tiebreak);
Hypervector bundle(std::span<const Hypervector* const> vs,
                   const Hypervector& tiebreak);

struct HammingResult {
  std::size_t distance = 0;
  double similarity = 0.0;
};

HammingResult hamming(const Hypervector& a, const Hypervector& b);

inline double similarity(const Hypervector& a, const Hypervector& b) {
  return hamming(a, b).similarity;
}

// Deterministic pseudorandom token for (name, seed). L must be a positive
// multiple of 8.
Hypervector generate_token(std::string_view name, std::size_t length,
                           std::uint64_t seed);

}  // namespace hdcam

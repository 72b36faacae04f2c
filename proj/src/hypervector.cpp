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

#include "hdcam/hypervector.hpp"

#include <bit>
#include <cstring>
#include <string>
#include <string_view>

#include "hdcam/error.hpp"
#include "hdcam/hash.hpp"

namespace hdcam {

namespace {

std::size_t word_count(std::size_t length) { return (length + 63) / 64; }

void require_same_length(const Hypervector& a, const Hypervector& b,
                         const char* op) {
  if (a.size() != b.size()) {
    throw DimensionError(std::string(op) + ": length mismatch (" +
                         std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()) + ")");
  }
}

}  // namespace

Hypervector::Hypervector(std::size_t length)
    : length_(length), words_(word_count(length), 0) {}

Hypervector Hypervector::from_bytes(std::span<const std::uint8_t> bytes,
                                    std::size_t length) {
  if (bytes.size() != (length + 7) / 8) {
    throw DimensionError("from_bytes: expected " +
                         std::to_string((length + 7) / 8) + " bytes, got " +
                         std::to_string(bytes.size()));
  }
  Hypervector hv(length);
  for (std::size_t k = 0; k < bytes.size(); ++k) {
    hv.words_[k / 8] |= std::uint64_t{bytes[k]} << (8 * (k % 8));
  }
  hv.clear_padding();
  return hv;
}

Hypervector Hypervector::from_words(std::vector<std::uint64_t> words,
                                    std::size_t length) {
  if (words.size() != word_count(length)) {
    throw DimensionError("from_words: word count does not match length");
  }
  Hypervector hv;
  hv.length_ = length;
  hv.words_ = std::move(words);
  hv.clear_padding();
  return hv;
}

void Hypervector::clear_padding() {
  std::size_t tail = length_ & 63;
  if (tail != 0 && !words_.empty()) {
    words_.back() &= (std::uint64_t{1} << tail) - 1;
  }
}

void Hypervector::set_bit(std::size_t i, bool v) {
  std::uint64_t mask = std::uint64_t{1} << (i & 63);
  if (v) {
    words_[i >> 6] |= mask;
  } else {
    words_[i >> 6] &= ~mask;
  }
}

Hypervector Hypervector::flipped(std::size_t i) const {
  Hypervector out = *this;
  out.flip_bit(i);
  return out;
}

std::size_t Hypervector::popcount() const {
  std::size_t n = 0;
  for (std::uint64_t w : words_) n += std::popcount(w);
  return n;
}

std::vector<std::uint8_t> Hypervector::to_bytes() const {
  std::vector<std::uint8_t> out((length_ + 7) / 8);
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = static_cast<std::uint8_t>(words_[k / 8] >> (8 * (k % 8)));
  }
  return out;
}

void Hypervector::extract_bits(std::size_t first, std::size_t count,
                               std::uint8_t* out) const {
  std::size_t nbytes = (count + 7) / 8;
  if ((first & 7) == 0) {
    // Byte aligned: bytes come straight out of the little-endian words.
    std::size_t byte0 = first / 8;
    for (std::size_t k = 0; k < nbytes; ++k) {
      std::size_t b = byte0 + k;
      out[k] = static_cast<std::uint8_t>(words_[b / 8] >> (8 * (b % 8)));
    }
  } else {
    for (std::size_t k = 0; k < nbytes; ++k) {
      std::size_t pos = first + 8 * k;
      std::size_t w = pos >> 6;
      unsigned s = pos & 63;
      std::uint64_t v = words_[w] >> s;
      if (s > 56 && w + 1 < words_.size()) v |= words_[w + 1] << (64 - s);
      out[k] = static_cast<std::uint8_t>(v);
    }
  }
  std::size_t tail = count & 7;
  if (tail != 0) out[nbytes - 1] &= static_cast<std::uint8_t>((1U << tail) - 1);
}

Hypervector Hypervector::operator~() const {
  Hypervector out = *this;
  for (auto& w : out.words_) w = ~w;
  out.clear_padding();
  return out;
}

Hypervector Hypervector::operator^(const Hypervector& other) const {
  require_same_length(*this, other, "xor");
  Hypervector out = *this;
  for (std::size_t i = 0; i < words_.size(); ++i) out.words_[i] ^= other.words_[i];
  return out;
}

Hypervector Hypervector::rotl1() const {
  Hypervector out(length_);
  if (length_ == 0) return out;
  std::uint64_t carry = bit(length_ - 1) ? 1 : 0;
  for (std::size_t i = 0; i < words_.size(); ++i) {
    out.words_[i] = (words_[i] << 1) | carry;
    carry = words_[i] >> 63;
  }
  out.clear_padding();
  return out;
}

Hypervector Hypervector::rotr1() const {
  Hypervector out(length_);
  if (length_ == 0) return out;
  std::size_t n = words_.size();
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t next = (i + 1 < n) ? words_[i + 1] : 0;
    out.words_[i] = (words_[i] >> 1) | (next << 63);
  }
  if (bit(0)) out.set_bit(length_ - 1, true);
  out.clear_padding();
  return out;
}

Hypervector bind(const Hypervector& a, const Hypervector& b) {
  require_same_length(a, b, "bind");
  return a ^ b.rotl1();
}

Hypervector unbind_role(const Hypervector& bound, const Hypervector& role) {
  require_same_length(bound, role, "unbind_role");
  return (bound ^ role).rotr1();
}

namespace {

template <typename Get>
Hypervector bundle_impl(std::size_t n, Get get, const Hypervector& tiebreak) {
  if (n == 0) throw EmptyInputError("bundle: empty sequence");
  const std::size_t length = get(0).size();
  require_same_length(get(0), tiebreak, "bundle");
  if (n == 1) return get(0);
  std::vector<std::uint32_t> counts(length, 0);
  for (std::size_t k = 0; k < n; ++k) {
    const Hypervector& v = get(k);
    require_same_length(v, tiebreak, "bundle");
    auto ws = v.words();
    for (std::size_t w = 0; w < ws.size(); ++w) {
      std::uint64_t x = ws[w];
      while (x != 0) {
        counts[w * 64 + std::countr_zero(x)]++;
        x &= x - 1;
      }
    }
  }
  Hypervector out(length);
  for (std::size_t i = 0; i < length; ++i) {
    std::uint64_t twice = 2ULL * counts[i];
    if (twice > n) {
      out.set_bit(i, true);
    } else if (twice == n) {
      out.set_bit(i, tiebreak.bit(i));
    }
  }
  return out;
}

}  // namespace

Hypervector bundle(std::span<const Hypervector> vs, const Hypervector& tiebreak) {
  return bundle_impl(
      vs.size(), [&](std::size_t k) -> const Hypervector& { return vs[k]; },
      tiebreak);
}

Hypervector bundle(std::span<const Hypervector* const> vs,
                   const Hypervector& tiebreak) {
  return bundle_impl(
      vs.size(), [&](std::size_t k) -> const Hypervector& { return *vs[k]; },
      tiebreak);
}

HammingResult hamming(const Hypervector& a, const Hypervector& b) {
  require_same_length(a, b, "hamming");
  std::size_t d = 0;
  auto wa = a.words();
  auto wb = b.words();
  for (std::size_t i = 0; i < wa.size(); ++i) d += std::popcount(wa[i] ^ wb[i]);
  HammingResult r;
  r.distance = d;
  r.similarity = a.size() == 0
                     ? 1.0
                     : 1.0 - static_cast<double>(d) / static_cast<double>(a.size());
  return r;
}

Hypervector generate_token(std::string_view name, std::size_t length,
                           std::uint64_t seed) {
  if (length == 0 || length % 8 != 0) {
    throw DimensionError("generate_token: length must be a positive multiple "
                         "of 8, got " + std::to_string(length));
  }
  SplitMix64 rng(hash_pair(seed, fnv1a64(name)));
  std::vector<std::uint64_t> words(word_count(length));
  for (auto& w : words) w = rng.next();
  return Hypervector::from_words(std::move(words), length);
}

}  // namespace hdcam

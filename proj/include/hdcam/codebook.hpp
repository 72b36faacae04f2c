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
#include <map>
#include <memory>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>

#include "hdcam/hypervector.hpp"

namespace hdcam {

inline constexpr std::string_view kTiebreakToken = "__tiebreak__";

// Lazily populated name -> token map. Lookups are safe from many threads;
// inserts take the writer lock. Returned references stay valid for the
// lifetime of the codebook.
class TokenCodebook {
 public:
  TokenCodebook(std::uint64_t seed, std::size_t length);

  TokenCodebook(const TokenCodebook&) = delete;
  TokenCodebook& operator=(const TokenCodebook&) = delete;

  std::uint64_t seed() const { return seed_; }
  std::size_t length() const { return length_; }

  const Hypervector& get(std::string_view name);
  const Hypervector& tiebreak() { return get(kTiebreakToken); }

  bool contains(std::string_view name) const;
  std::size_t size() const;

  // Binary file: magic, L, seed, count, then (name length, name, bits).
  // Records are written in name order so the file is canonical.
  void save(const std::filesystem::path& path) const;
  static std::unique_ptr<TokenCodebook> load(const std::filesystem::path& path);

 private:
  std::uint64_t seed_;
  std::size_t length_;
  mutable std::shared_mutex mu_;
  std::unordered_map<std::string, Hypervector> entries_;
};

}  // namespace hdcam

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

#include "hdcam/codebook.hpp"

#include <algorithm>
#include <memory>
#include <mutex>
#include <vector>

#include "hdcam/binio.hpp"
#include "hdcam/error.hpp"

namespace hdcam {

namespace {
constexpr char kMagic[9] = "HDCAMCB1";
}

TokenCodebook::TokenCodebook(std::uint64_t seed, std::size_t length)
    : seed_(seed), length_(length) {
  if (length == 0 || length % 8 != 0) {
    throw DimensionError("codebook: length must be a positive multiple of 8");
  }
}

const Hypervector& TokenCodebook::get(std::string_view name) {
  {
    std::shared_lock lock(mu_);
    auto it = entries_.find(std::string(name));
    if (it != entries_.end()) return it->second;
  }
  Hypervector hv = generate_token(name, length_, seed_);
  std::unique_lock lock(mu_);
  auto [it, inserted] = entries_.try_emplace(std::string(name), std::move(hv));
  return it->second;
}

bool TokenCodebook::contains(std::string_view name) const {
  std::shared_lock lock(mu_);
  return entries_.count(std::string(name)) != 0;
}

std::size_t TokenCodebook::size() const {
  std::shared_lock lock(mu_);
  return entries_.size();
}

void TokenCodebook::save(const std::filesystem::path& path) const {
  std::shared_lock lock(mu_);
  std::vector<const std::string*> names;
  names.reserve(entries_.size());
  for (const auto& [name, hv] : entries_) names.push_back(&name);
  std::sort(names.begin(), names.end(),
            [](const std::string* a, const std::string* b) { return *a < *b; });

  auto os = binio::open_out(path.string());
  binio::put_bytes(os, kMagic, 8);
  binio::put_u64(os, length_);
  binio::put_u64(os, seed_);
  binio::put_u64(os, names.size());
  for (const std::string* name : names) {
    binio::put_string(os, *name);
    auto bytes = entries_.at(*name).to_bytes();
    binio::put_bytes(os, bytes.data(), bytes.size());
  }
  binio::finish(os, path.string());
}

std::unique_ptr<TokenCodebook> TokenCodebook::load(
    const std::filesystem::path& path) {
  auto is = binio::open_in(path.string());
  binio::expect_magic(is, kMagic);
  std::uint64_t length = binio::get_u64(is);
  std::uint64_t seed = binio::get_u64(is);
  std::uint64_t count = binio::get_u64(is);
  auto cb = std::make_unique<TokenCodebook>(seed, length);
  std::vector<std::uint8_t> bytes((length + 7) / 8);
  for (std::uint64_t i = 0; i < count; ++i) {
    std::string name = binio::get_string(is);
    binio::get_bytes(is, bytes.data(), bytes.size());
    cb->entries_.try_emplace(std::move(name),
                             Hypervector::from_bytes(bytes, length));
  }
  return cb;
}

}  // namespace hdcam

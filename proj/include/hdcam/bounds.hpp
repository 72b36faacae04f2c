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

#include <cstdint>
#include <vector>

#include <json.hpp>

namespace hdcam {

struct BoundsReport {
  std::uint64_t blocks = 0;    // N
  double address_space = 0.0;  // M, p = 1/M
  double p = 0.0;
  double mu = 0.0;
  double theta = 0.0;
  double delta = 0.0;
  double ln_p_error = 0.0;          // multiplicative Chernoff, 0 when delta <= 0
  std::vector<double> poisson;      // P(k) for k = 0..floor(theta)
  std::vector<double> ln_poisson;   // ln P(k), finite where P(k) underflows
  double cr1 = 1.0;
  std::uint32_t gens = 0;
  double cr2_prediction = 1.0;      // cr1 multiplied gens times

  nlohmann::ordered_json to_json() const;
};

// M = 2^m - 1.
BoundsReport bounds(std::uint64_t blocks, unsigned depth_bits, double cr1, std::uint32_t gens);

// Same report for an explicit address-space size M.
BoundsReport bounds_for_address_space(std::uint64_t blocks, double address_space, double cr1,
                                      std::uint32_t gens);

// Product of gens copies of cr1, in the order a trace accumulates it.
double cr2_prediction(double cr1, std::uint32_t gens);

}  // namespace hdcam

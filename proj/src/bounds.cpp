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

#include "hdcam/bounds.hpp"

#include <cmath>

#include "hdcam/error.hpp"
#include "hdcam/trace_io.hpp"

namespace hdcam {

double cr2_prediction(double cr1, std::uint32_t gens) {
  double v = 1.0;
  for (std::uint32_t i = 0; i < gens; ++i) v *= cr1;
  return v;
}

BoundsReport bounds_for_address_space(std::uint64_t blocks, double address_space, double cr1,
                                      std::uint32_t gens) {
  if (blocks < 2) throw DimensionError("bounds: N must be at least 2");
  if (!(address_space >= 1.0)) throw DimensionError("bounds: M must be at least 1");
  if (!(cr1 > 0.0 && cr1 <= 1.0)) throw DimensionError("bounds: cr1 must lie in (0, 1]");
  BoundsReport r;
  r.blocks = blocks;
  r.address_space = address_space;
  r.p = 1.0 / address_space;
  r.mu = static_cast<double>(blocks) * r.p;
  r.theta = static_cast<double>(blocks) / 2.0;
  r.delta = r.theta / r.mu - 1.0;
  if (r.delta > 0.0) {
    r.ln_p_error = r.mu * (r.delta - (1.0 + r.delta) * std::log1p(r.delta));
  }
  auto kmax = static_cast<std::uint64_t>(std::floor(r.theta));
  r.poisson.reserve(kmax + 1);
  r.ln_poisson.reserve(kmax + 1);
  for (std::uint64_t k = 0; k <= kmax; ++k) {
    double kk = static_cast<double>(k);
    double lp = -r.mu + kk * std::log(r.mu) - std::lgamma(kk + 1.0);
    r.ln_poisson.push_back(lp);
    r.poisson.push_back(std::exp(lp));
  }
  r.cr1 = cr1;
  r.gens = gens;
  r.cr2_prediction = cr2_prediction(cr1, gens);
  return r;
}

BoundsReport bounds(std::uint64_t blocks, unsigned depth_bits, double cr1, std::uint32_t gens) {
  if (depth_bits < 1 || depth_bits > 62) throw DimensionError("bounds: m must be in [1, 62]");
  double m_space = std::ldexp(1.0, static_cast<int>(depth_bits)) - 1.0;
  return bounds_for_address_space(blocks, m_space, cr1, gens);
}

nlohmann::ordered_json BoundsReport::to_json() const {
  nlohmann::ordered_json j;
  j["N"] = blocks;
  j["M"] = address_space;
  j["p"] = p;
  j["mu"] = round9(mu);
  j["theta"] = theta;
  j["delta"] = round9(delta);
  j["ln_p_error"] = round9(ln_p_error);
  j["cr1"] = cr1;
  j["gens"] = gens;
  j["cr2_prediction"] = round9(cr2_prediction);
  auto lp = nlohmann::ordered_json::array();
  for (double v : ln_poisson) lp.push_back(round9(v));
  j["ln_poisson"] = std::move(lp);
  auto pp = nlohmann::ordered_json::array();
  for (double v : poisson) pp.push_back(v);
  j["poisson"] = std::move(pp);
  return j;
}

}  // namespace hdcam

/* Copyright 2026 The tlmsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#include "tlmsim/analytic.hpp"

#include <cmath>

#include "tlmsim/errors.hpp"

namespace tlmsim::analytic {

void Params::validate() const {
  if (m < 1 || n < 1 || k < 1 || l < 1) throw ConfigError("m, n, k and l must be >= 1");
  if (c_s < 0 || c_b < 0) throw ConfigError("c_s and c_b must be non-negative");
  if (k > m) throw ConfigError("k must not exceed m");
  if (std::fmod(m, k) != 0.0) throw ConfigError("k must divide m");
}

double omega_s(double nu, double c_s) {
  if (nu < 1) throw ConfigError("selection over fewer than one candidate");
  return c_s * std::log2(nu);
}

double omega_cmp(const Params& p) {
  return std::log2(p.n) * omega_s(p.k, p.c_s) + (p.n / p.k) * omega_s(p.m / p.k, p.c_s);
}

double omega_msg(const Params& p) { return p.c_b * p.k + p.c_b * p.m / p.k; }

double omega(const Params& p) { return omega_cmp(p) + omega_msg(p); }

double speedup(const Params& p) {
  p.validate();
  return p.n * p.l / (std::ceil(p.n / p.m) * p.l + omega(p));
}

std::vector<CurvePoint> model_curve(const Params& base, const std::vector<std::uint32_t>& k_values) {
  std::vector<CurvePoint> out;
  out.reserve(k_values.size());
  for (std::uint32_t k : k_values) {
    Params p = base;
    p.k = k;
    out.push_back({p.k, omega_cmp(p), omega_msg(p), speedup(p)});
  }
  return out;
}

std::vector<std::uint32_t> power_of_two_grid(std::uint32_t m) {
  std::vector<std::uint32_t> ks;
  for (std::uint32_t k = 1; k <= m && k != 0; k *= 2) ks.push_back(k);
  return ks;
}

}  // namespace tlmsim::analytic

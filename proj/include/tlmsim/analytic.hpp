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


#pragma once

#include <cstdint>
#include <vector>

namespace tlmsim::analytic {

struct Params {
  double m = 256;
  double n = 256;
  double k = 16;
  double l = 16000;
  double c_s = 8;
  double c_b = 8;

  /// Throws ConfigError unless all values are >= 1 (c_s, c_b >= 0), k <= m
  /// and k divides m.
  void validate() const;
};

/// Cost of one min-search over nu candidates: c_s * log2(nu).
double omega_s(double nu, double c_s);
/// Mapping computation: log2(n) * omega_s(k) + (n / k) * omega_s(m / k).
double omega_cmp(const Params& p);
/// Messaging: c_b * k + c_b * m / k.
double omega_msg(const Params& p);
double omega(const Params& p);
/// S = n * l / (ceil(n / m) * l + omega).
double speedup(const Params& p);

struct CurvePoint {
  double k;
  double omega_cmp;
  double omega_msg;
  double speedup;
};

/// Evaluates the model for every k in k_values, other fields taken from base.
std::vector<CurvePoint> model_curve(const Params& base, const std::vector<std::uint32_t>& k_values);

/// Powers of two from 1 to m inclusive.
std::vector<std::uint32_t> power_of_two_grid(std::uint32_t m);

}  // namespace tlmsim::analytic

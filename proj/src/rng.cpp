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


#include "tlmsim/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace tlmsim {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t cell, std::uint64_t rep) {
  return (base ^ cell) + rep * 0x9E3779B97F4A7C15ull;
}

Rng::Rng(std::uint64_t seed) : state_(splitmix64(seed)) {
  if (state_ == 0) state_ = 0x9E3779B97F4A7C15ull;
}

std::uint64_t Rng::next_u64() {
  state_ ^= state_ >> 12;
  state_ ^= state_ << 25;
  state_ ^= state_ >> 27;
  return state_ * 0x2545F4914F6CDD1Dull;
}

double Rng::next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("Rng::below: bound must be positive");
  // Rejection keeps the result unbiased.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return x % bound;
}

std::uint64_t Rng::between(std::uint64_t lo, std::uint64_t hi) {
  if (hi < lo) throw std::invalid_argument("Rng::between: empty range");
  if (hi - lo == UINT64_MAX) return next_u64();
  return lo + below(hi - lo + 1);
}

std::uint64_t Rng::poisson(double mean) {
  if (!(mean > 0.0)) throw std::invalid_argument("Rng::poisson: mean must be positive");
  return mean < 10.0 ? poisson_small(mean) : poisson_ptrs(mean);
}

// Knuth's product-of-uniforms method.
std::uint64_t Rng::exponential(double mean) {
  if (!(mean > 0.0)) throw std::invalid_argument("Rng::exponential: mean must be positive");
  return static_cast<std::uint64_t>(std::llround(-mean * std::log1p(-next_double())));
}

std::uint64_t Rng::poisson_small(double mean) {
  const double limit = std::exp(-mean);
  double p = next_double();
  std::uint64_t k = 0;
  while (p > limit) {
    ++k;
    p *= next_double();
  }
  return k;
}

// Hoermann's transformed rejection with squeeze (PTRS), valid for mean >= 10.
std::uint64_t Rng::poisson_ptrs(double mean) {
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = next_double() - 0.5;
    const double v = next_double();
    const double us = 0.5 - std::fabs(u);
    const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    const double lhs = std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b);
    const double rhs = -mean + k * loglam - std::lgamma(k + 1.0);
    if (lhs <= rhs) return static_cast<std::uint64_t>(k);
  }
}

}  // namespace tlmsim

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

namespace tlmsim {

/// xorshift64* generator (Marsaglia shifts 12/25/27, multiplier
/// 0x2545F4914F6CDD1D). The seed is first scrambled with one SplitMix64 step,
/// so every 64-bit seed, including 0, yields a valid non-zero state.
///
/// All distributions below are implemented here rather than taken from
/// <random>, whose distribution algorithms differ between standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  /// Uniform double in [0, 1) with 53 random bits.
  double next_double();
  /// Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);
  /// Uniform integer in [lo, hi], inclusive.
  std::uint64_t between(std::uint64_t lo, std::uint64_t hi);
  /// Poisson-distributed integer with the given mean (> 0).
  std::uint64_t poisson(double mean);
  /// Exponentially distributed value with the given mean (> 0), rounded to
  /// the nearest integer.
  std::uint64_t exponential(double mean);

  std::uint64_t state() const noexcept { return state_; }

 private:
  std::uint64_t poisson_small(double mean);
  std::uint64_t poisson_ptrs(double mean);

  std::uint64_t state_;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Seed for repetition `rep` of sweep cell `cell`: base XOR cell, mixed with
/// the repetition index.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t cell, std::uint64_t rep);

}  // namespace tlmsim

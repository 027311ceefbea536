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


#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "tlmsim/analytic.hpp"
#include "tlmsim/errors.hpp"

namespace tlmsim::analytic {
namespace {

Params ref(double k) {
  Params p;
  p.m = 256;
  p.n = 256;
  p.k = k;
  return p;
}

TEST(Analytic, SelectionCost) {
  EXPECT_DOUBLE_EQ(omega_s(16, 8), 32);
  EXPECT_DOUBLE_EQ(omega_s(256, 8), 64);
  EXPECT_DOUBLE_EQ(omega_s(1, 8), 0);
}

TEST(Analytic, ComputeOverhead) {
  EXPECT_DOUBLE_EQ(omega_cmp(ref(16)), 768);  // 8*32 + 16*32
  // k = m: local term vanishes.
  EXPECT_DOUBLE_EQ(omega_cmp(ref(256)), 8 * omega_s(256, 8));
  // k = 1: global term vanishes.
  EXPECT_DOUBLE_EQ(omega_cmp(ref(1)), 256 * 8 * 8);
}

TEST(Analytic, MessageOverhead) {
  EXPECT_DOUBLE_EQ(omega_msg(ref(16)), 256);
  EXPECT_DOUBLE_EQ(omega_msg(ref(1)), 2056);
  double best = 1e300, arg = 0;
  for (double k = 1; k <= 256; k *= 2) {
    if (omega_msg(ref(k)) < best) {
      best = omega_msg(ref(k));
      arg = k;
    }
  }
  EXPECT_EQ(arg, 16);
}

TEST(Analytic, SpeedupReference) {
  // 256 * 16000 / (16000 + 768 + 256)
  EXPECT_NEAR(speedup(ref(16)), 4096000.0 / 17024.0, 1e-9);
  EXPECT_NEAR(speedup(ref(16)), 240.6, 0.05);
}

TEST(Analytic, SerialBound) {
  Params p;
  p.m = 1;
  p.k = 1;
  p.n = 10;
  EXPECT_LT(speedup(p), 1.0);
}

TEST(Analytic, OptimumAndShape) {
  const auto grid = power_of_two_grid(256);
  ASSERT_EQ(grid.size(), 9u);
  const auto curve = model_curve(ref(1), grid);
  const auto best = std::max_element(curve.begin(), curve.end(),
                                     [](const CurvePoint& a, const CurvePoint& b) { return a.speedup < b.speedup; });
  EXPECT_TRUE(best->k == 32 || best->k == 64);
  // Unimodal: rises to the peak, falls after.
  const auto peak = static_cast<std::size_t>(best - curve.begin());
  for (std::size_t i = 1; i <= peak; ++i) EXPECT_GT(curve[i].speedup, curve[i - 1].speedup);
  for (std::size_t i = peak + 1; i < curve.size(); ++i) EXPECT_LT(curve[i].speedup, curve[i - 1].speedup);
}

TEST(Analytic, ZeroOverheadIsIdeal) {
  for (double k = 1; k <= 256; k *= 2) {
    Params p = ref(k);
    p.c_s = 0;
    p.c_b = 0;
    EXPECT_DOUBLE_EQ(speedup(p), 256);
    p.n = 100;
    EXPECT_DOUBLE_EQ(speedup(p), 100);
  }
}

TEST(Analytic, MoreSelectionCostLowersSpeedup) {
  for (double k = 2; k <= 256; k *= 2) {
    Params p = ref(k);
    const double s = speedup(p);
    p.c_s *= 2;
    EXPECT_LT(speedup(p), s);
  }
}

TEST(Analytic, Validation) {
  Params p = ref(3);
  EXPECT_THROW(p.validate(), tlmsim::ConfigError);
  p = ref(16);
  p.l = 0;
  EXPECT_THROW(p.validate(), tlmsim::ConfigError);
}

}  // namespace
}  // namespace tlmsim::analytic

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

#include <cmath>
#include <set>

#include "tlmsim/rng.hpp"
#include "tlmsim/traces.hpp"

namespace tlmsim {
namespace {

TEST(TraceParse, MinimalChild) {
  const auto p = parse_trace("compute 16000\nsyscall join-exit $r0\n");
  ASSERT_EQ(p.steps.size(), 2u);
  EXPECT_EQ(std::get<ComputeStep>(p.steps[0]).ticks, 16000u);
  const auto& s = std::get<SyscallStep>(p.steps[1]);
  EXPECT_EQ(s.call, Syscall::JoinExit);
  EXPECT_EQ(std::get<RegRef>(s.args.at(0)).index, 0);
  EXPECT_EQ(p.compute_ticks(), 16000u);
}

TEST(TraceParse, ParentProgram) {
  const auto p = parse_trace(
      "syscall join-init 100 -> $r0\nsyscall rcsv-spwn @child 0 100\nsyscall join-wait $r0\n"
      "syscall join-free $r0\nsyscall rcsv-exit 0");
  ASSERT_EQ(p.steps.size(), 5u);
  const auto& init = std::get<SyscallStep>(p.steps[0]);
  EXPECT_EQ(init.call, Syscall::JoinInit);
  EXPECT_EQ(init.result_reg, std::optional<std::uint8_t>(0));
  const auto& spwn = std::get<SyscallStep>(p.steps[1]);
  EXPECT_EQ(std::get<LabelRef>(spwn.args[0]).name, "child");
  EXPECT_EQ(std::get<std::uint32_t>(spwn.args[2]), 100u);
  EXPECT_EQ(p.compute_ticks(), 0u);
}

TEST(TraceParse, Rejections) {
  EXPECT_THROW(parse_trace("compute -5\nsyscall rcsv-exit 0"), TraceError);
  EXPECT_THROW(parse_trace("compute 10"), TraceError);                              // no terminating call
  EXPECT_THROW(parse_trace("syscall rcsv-exit 0\ncompute 5"), TraceError);          // step after exit
  EXPECT_THROW(parse_trace("syscall join-exit\n"), TraceError);                     // arity
  EXPECT_THROW(parse_trace("syscall fork 1\nsyscall rcsv-exit 0"), TraceError);     // unknown call
  EXPECT_THROW(parse_trace("syscall join-exit $r9"), TraceError);                   // register range
  EXPECT_THROW(parse_trace(""), TraceError);
}

TEST(TraceParse, ErrorsCarryLineNumbers) {
  try {
    parse_trace("compute 1\nmem 2\nbogus 3\nsyscall rcsv-exit 0");
    FAIL();
  } catch (const TraceError& e) {
    EXPECT_NE(std::string(e.what()).find('3'), std::string::npos) << e.what();
  }
}

TEST(TraceParse, PrintRoundTrip) {
  const auto parent = make_parent_trace(100);
  EXPECT_EQ(parse_trace(print_trace(parent)), parent);
  const auto child = make_child_trace(15432);
  EXPECT_EQ(parse_trace(print_trace(child)), child);
}

TEST(TraceParse, MultiTaskFile) {
  const auto ps = parse_trace_file("task a:\ncompute 3\nsyscall rcsv-exit 0\ntask b:\nmem 4\nsyscall join-exit 7\n");
  ASSERT_EQ(ps.size(), 2u);
  EXPECT_EQ(ps[0].name, "a");
  EXPECT_EQ(ps[1].name, "b");
  EXPECT_EQ(std::get<MemStep>(ps[1].steps[0]).ticks, 4u);
}

TEST(TraceLibrary, FamiliesAndVariants) {
  TraceLibrary lib;
  const auto f = lib.add_family({make_child_trace(1), make_child_trace(2)});
  EXPECT_EQ(lib.family_size(f), 2u);
  EXPECT_EQ(lib.program(f, 1).compute_ticks(), 2u);
  EXPECT_THROW(lib.program(f + 1, 0), TraceError);
  EXPECT_THROW(lib.add_family({}), TraceError);
}

TEST(Workload, IndependentBundle) {
  const auto app = gen_independent(256, 16000);
  EXPECT_EQ(app.n_children(), 256u);
  EXPECT_EQ(app.sequential_ticks(), 256u * 16000u);
  EXPECT_EQ(gen_independent(1, 5).n_children(), 1u);
  EXPECT_THROW(gen_independent(0, 5), ConfigError);
}

TEST(Workload, InterferenceSchedule) {
  BenchmarkSpec spec;
  spec.kind = BenchmarkKind::Interference;
  spec.len_dist = LengthDist::Uniform95;
  Rng rng(7);
  const auto sched = gen_interference_schedule(spec, 10'000'000, 16, rng);
  ASSERT_FALSE(sched.empty());
  Tick prev = 0;
  for (const auto& inj : sched) {
    EXPECT_LT(inj.at, 9'000'000u);
    EXPECT_GE(inj.at, prev);
    prev = inj.at;
    EXPECT_LT(inj.gmn, 16u);
    ASSERT_EQ(inj.app.n_children(), 100u);
    for (const auto& c : inj.app.children) {
      EXPECT_GE(c.compute_ticks(), 15200u);
      EXPECT_LE(c.compute_ticks(), 16000u);
    }
  }
  // Mean gap near 7999.
  const double gap = static_cast<double>(sched.back().at) / static_cast<double>(sched.size() - 1);
  EXPECT_NEAR(gap, 7999.0, 80.0);

  Rng again(7);
  const auto sched2 = gen_interference_schedule(spec, 10'000'000, 16, again);
  ASSERT_EQ(sched2.size(), sched.size());
  for (std::size_t i = 0; i < sched.size(); ++i) {
    EXPECT_EQ(sched2[i].at, sched[i].at);
    EXPECT_EQ(sched2[i].gmn, sched[i].gmn);
  }
}

TEST(Rng, PoissonMeanWithinTwoPercent) {
  for (double mean : {3.0, 40.0, 7999.0}) {
    Rng rng(11);
    double sum = 0;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) sum += static_cast<double>(rng.poisson(mean));
    EXPECT_NEAR(sum / draws, mean, 0.02 * mean) << "mean=" << mean;
  }
}

TEST(Rng, PoissonVarianceMatchesMean) {
  Rng rng(3);
  const double mean = 7999;
  double s = 0, s2 = 0;
  const int draws = 20000;
  for (int i = 0; i < draws; ++i) {
    const double x = static_cast<double>(rng.poisson(mean));
    s += x;
    s2 += x * x;
  }
  const double var = s2 / draws - (s / draws) * (s / draws);
  EXPECT_NEAR(var, mean, 0.1 * mean);
}

TEST(Rng, ExponentialMean) {
  Rng rng(5);
  double sum = 0;
  for (int i = 0; i < 20000; ++i) sum += static_cast<double>(rng.exponential(7999));
  EXPECT_NEAR(sum / 20000, 7999, 0.03 * 7999);
}

TEST(Rng, BetweenIsInclusiveAndCoversRange) {
  Rng rng(1);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    const auto v = rng.between(10, 15);
    ASSERT_GE(v, 10u);
    ASSERT_LE(v, 15u);
    seen.insert(v);
  }
  EXPECT_EQ(seen.size(), 6u);
}

TEST(Rng, Deterministic) {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    differs = differs || x != c.next_u64();
  }
  EXPECT_TRUE(differs);
  EXPECT_NE(derive_seed(1, 0, 0), derive_seed(1, 0, 1));
  EXPECT_NE(derive_seed(1, 0, 0), derive_seed(1, 1, 0));
}

}  // namespace
}  // namespace tlmsim

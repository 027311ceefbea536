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

#include <cstdio>
#include <fstream>
#include <sstream>

#include "tlmsim/experiments.hpp"

namespace tlmsim {
namespace {

std::string csv(const std::vector<CsvRow>& rows) {
  std::ostringstream os;
  write_csv(os, rows);
  return os.str();
}

TEST(Config, EmptyTextNeedsK) {
  EXPECT_THROW(parse_config(""), ConfigError);
  const auto cfg = parse_config("k = 16");
  EXPECT_EQ(cfg.m, 256u);
  EXPECT_EQ(cfg.global_bus_width, 32u);
  EXPECT_EQ(cfg.local_bus_width, 32u);
  EXPECT_EQ(cfg.tx_delay, 4u);
  EXPECT_EQ(cfg.rx_delay, 4u);
  EXPECT_EQ(cfg.c_b(), 8u);
  EXPECT_EQ(cfg.c_s, 8u);
  EXPECT_EQ(cfg.bench.max_len, 16000u);
  EXPECT_EQ(cfg.sim_length, 10'000'000u);
}

TEST(Config, Rejections) {
  EXPECT_THROW(parse_config("k = 3"), ConfigError);
  EXPECT_THROW(parse_config("k = 16\nbogus = 1"), ConfigError);
  EXPECT_THROW(parse_config("k = 16\nm = 0"), ConfigError);
  EXPECT_THROW(parse_config("k = sixteen"), ConfigError);
  EXPECT_THROW(parse_config("k = 16\njoin_wait = maybe"), ConfigError);
  EXPECT_THROW(parse_config("k 16"), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/tlmsim.cfg"), ConfigError);
}

TEST(Config, OverridesWinAndCommentsAreSkipped) {
  const auto cfg = parse_config("# comment\n\nk = 16\n  c_s = 4  \ndelta_n_th = 2 # trailing\n", {{"c_s", "12"}});
  EXPECT_EQ(cfg.c_s, 12u);
  EXPECT_EQ(cfg.delta_n_th, 2u);
  for (const auto& key : config_keys()) EXPECT_NO_THROW(get_setting(cfg, key)) << key;
  // Every setting survives a print/parse round trip.
  std::string text;
  for (const auto& key : config_keys()) text += key + " = " + get_setting(cfg, key) + "\n";
  const auto again = parse_config(text);
  for (const auto& key : config_keys()) EXPECT_EQ(get_setting(again, key), get_setting(cfg, key)) << key;
}

TEST(Axis, Forms) {
  const auto a = parse_axis("k=1..256");
  EXPECT_EQ(a.key, "k");
  EXPECT_EQ(a.values.size(), 9u);
  EXPECT_EQ(a.values.back(), "256");
  const auto b = parse_axis("delta_n_th = 1, 2,4");
  EXPECT_EQ(b.values, (std::vector<std::string>{"1", "2", "4"}));
  EXPECT_THROW(parse_axis("nope=1"), ConfigError);
  EXPECT_THROW(parse_axis("k"), ConfigError);
  EXPECT_THROW(parse_axis("k=8..2"), ConfigError);
}

TEST(Speedup, MeanOverApps) {
  std::vector<AppRecord> apps(2);
  apps[0].injected = apps[1].injected = true;
  apps[0].sequential_ticks = 1000;
  apps[0].complete_tick = 100;
  apps[1].sequential_ticks = 1000;
  apps[1].inject_tick = 50;
  apps[1].complete_tick = 300;
  EXPECT_DOUBLE_EQ(*compute_speedup(apps), (10.0 + 4.0) / 2);
  apps[1].complete_tick.reset();
  EXPECT_FALSE(compute_speedup(apps).has_value());
  EXPECT_FALSE(compute_speedup({}).has_value());
}

TEST(Run, IndependentReferenceCell) {
  const auto cfg = parse_config("k = 16\nn = 256");
  const auto r = run_experiment(cfg);
  ASSERT_TRUE(r.valid());
  EXPECT_EQ(r.apps_injected, 1u);
  EXPECT_EQ(r.apps_completed, 1u);
  EXPECT_NEAR(*r.speedup, 240.6, 0.25 * 240.6);
  EXPECT_EQ(r.beacons_rx, r.beacons_tx * 15);
  EXPECT_TRUE(r.quiescent);
  EXPECT_EQ(r.nodes.size(), 256u + 16u);
}

TEST(Run, MissesSuppressTheRow) {
  // Far too short to finish.
  const auto cfg = parse_config("k = 4\nn = 8\nsim_length = 1000");
  const auto r = run_experiment(cfg);
  EXPECT_FALSE(r.valid());
  EXPECT_EQ(r.misses, 1u);
  EXPECT_FALSE(to_row(r).speedup.has_value());
  SweepCell cell{0, cfg, {r}};
  EXPECT_TRUE(sweep_rows({cell}).empty());
}

TEST(Sweep, CellsSeedsAndAggregates) {
  auto base = parse_config("k = 1\nn = 16\nm = 16\nmax_child_len = 500\nrepetitions = 3\n"
                           "length_dist = uniform95");
  const auto cells = sweep(base, {parse_axis("k=1..16")}, SweepOptions{2});
  ASSERT_EQ(cells.size(), 5u);
  EXPECT_EQ(cells[4].config.k, 16u);
  const auto rows = sweep_rows(cells);
  EXPECT_EQ(rows.size(), 5u * 4u);
  EXPECT_EQ(rows[3].seed, "mean");
  EXPECT_NE(rows[0].seed, rows[1].seed);
  const double mean = (*rows[0].speedup + *rows[1].speedup + *rows[2].speedup) / 3;
  EXPECT_NEAR(*rows[3].speedup, mean, 1e-9);
}

TEST(Sweep, OutputIndependentOfThreads) {
  auto base = parse_config("k = 4\nn = 16\nm = 16\nmax_child_len = 300\nrepetitions = 2\nlength_dist = uniform95");
  const auto a = csv(sweep_rows(sweep(base, {parse_axis("k=1,2,4"), parse_axis("delta_n_th=1,4")}, SweepOptions{1})));
  const auto b = csv(sweep_rows(sweep(base, {parse_axis("k=1,2,4"), parse_axis("delta_n_th=1,4")}, SweepOptions{4})));
  EXPECT_EQ(a, b);
}

TEST(Csv, HeaderOnlyForEmptyResults) {
  EXPECT_EQ(csv({}),
            "experiment,k,delta_n_th,c_s,c_b,seed,n,m,apps_injected,apps_completed,t_r_mean,speedup,"
            "beacons_tx,beacons_rx,msgs_total,global_bus_util,local_bus_util_mean\n");
}

TEST(Csv, EmitWritesFileAndReportsFailure) {
  const std::string path = ::testing::TempDir() + "tlmsim_emit.csv";
  emit_csv({}, path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header.substr(0, 12), "experiment,k");
  std::remove(path.c_str());
  EXPECT_THROW(emit_csv({}, "/nonexistent/dir/x.csv"), IoError);
}

TEST(Csv, DoubleFormatting) {
  EXPECT_EQ(format_double(1.5), "1.5");
  EXPECT_EQ(format_double(2.0), "2");
  EXPECT_EQ(format_double(1.0 / 3), "0.333333");
  EXPECT_EQ(format_double(-0.0000001), "0");
}

TEST(Csv, MessageLine) {
  const Topology topo{256, 16};
  const std::array<std::uint32_t, 2> d{1, 2};
  const auto msg = make_message(MessageType::TaskStart, NodeAddress::gmn(0), NodeAddress::lc(3), 0, false, d);
  EXPECT_EQ(format_message_line(44, msg, NodeAddress::lc(3), 3, topo), "44,task-start,0,19,0,0,3");
}

TEST(Compare, JoinsModelAndSimulation) {
  auto base = parse_config("k = 1\nn = 64\nm = 64");
  const auto rows = compare(base, {1, 8, 64});
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& r : rows) {
    ASSERT_TRUE(r.speedup_sim.has_value());
    EXPECT_NEAR(*r.speedup_sim / r.model.speedup, 1.0, 0.25) << "k=" << r.k;
  }
}

}  // namespace
}  // namespace tlmsim

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
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tlmsim/analytic.hpp"
#include "tlmsim/nodes.hpp"
#include "tlmsim/traces.hpp"

namespace tlmsim {

/// Simulation configuration. Defaults are the reference chip parameters;
/// k has no default and must be given.
struct SimConfig {
  std::string experiment = "run";
  std::uint32_t m = 256;
  std::uint32_t k = 0;
  unsigned global_bus_width = 32;
  unsigned local_bus_width = 32;
  Tick tx_delay = 4;
  Tick rx_delay = 4;
  Tick c_s = 8;
  Tick base_cost = 1;
  Tick sim_length = 10'000'000;
  std::uint32_t delta_n_th = 4;
  HelperScope helper_scope = HelperScope::Subtree;
  JoinWaitPolicy join_wait = JoinWaitPolicy::Yield;
  std::uint32_t inject_gmn = 0;  // independent benchmark only
  BenchmarkSpec bench;           // bench.max_len is the child length; bench.seed is unused
  std::uint64_t seed = 1;
  std::uint32_t repetitions = 1;

  Tick c_b() const noexcept { return tx_delay + rx_delay; }
  void validate() const;
  ChipConfig chip() const;
};

/// Known configuration keys, in documentation order.
const std::vector<std::string>& config_keys();
/// Applies one `key = value` setting. Throws ConfigError on an unknown key or
/// a malformed value.
void apply_setting(SimConfig& cfg, const std::string& key, const std::string& value);
std::string get_setting(const SimConfig& cfg, const std::string& key);

/// Parses `key = value` lines (# comments, blank lines allowed), then applies
/// `overrides` on top. Validates the result.
SimConfig parse_config(const std::string& text,
                       const std::vector<std::pair<std::string, std::string>>& overrides = {});
SimConfig load_config(const std::string& path,
                      const std::vector<std::pair<std::string, std::string>>& overrides = {});

struct BusUse {
  std::uint64_t granted = 0;
  std::uint64_t words = 0;
  std::uint64_t busy_ticks = 0;
};

struct NodeRecord {
  std::string node;  // "pe<i>" or "gmn<i>"
  std::uint64_t tasks_executed = 0;
  std::uint64_t busy_ticks = 0;
  std::uint64_t syscalls = 0;
  std::uint64_t messages_handled = 0;
  std::uint64_t handler_busy_ticks = 0;
};

struct RunResult {
  SimConfig config;
  std::uint64_t seed = 0;
  std::vector<AppRecord> apps;
  std::uint64_t apps_injected = 0;
  std::uint64_t apps_completed = 0;
  std::uint64_t misses = 0;
  std::optional<double> t_r_mean;
  std::optional<double> speedup;  // empty when the run is invalid
  std::uint64_t beacons_tx = 0;
  std::uint64_t beacons_rx = 0;
  std::uint64_t msgs_total = 0;
  double global_bus_util = 0;
  double local_bus_util_mean = 0;
  Tick final_time = 0;
  std::uint64_t events = 0;
  std::uint64_t tasks_created = 0;
  std::uint64_t helpers = 0;
  bool quiescent = false;
  std::vector<NodeRecord> nodes;

  bool valid() const noexcept { return misses == 0 && apps_completed > 0; }
};

/// Optional hooks for inspection while a run executes.
struct RunHooks {
  Chip::MessageObserver on_message;
  std::function<void(const LifecycleEvent&)> on_lifecycle;
  std::function<void(const MappingDecision&)> on_decision;
  std::function<void(const Chip&)> on_finish;
};

/// Mean over completed apps of sequential child time / response time. Empty
/// when no app completed or any app missed.
std::optional<double> compute_speedup(const std::vector<AppRecord>& apps);

RunResult run_experiment(const SimConfig& cfg, std::uint64_t seed, const RunHooks& hooks = {});
inline RunResult run_experiment(const SimConfig& cfg) { return run_experiment(cfg, cfg.seed); }

struct Axis {
  std::string key;
  std::vector<std::string> values;
};
/// Parses "key=v1,v2,..." and "key=lo..hi" (powers of two from lo to hi).
Axis parse_axis(const std::string& text);

struct CsvRow {
  std::string experiment;
  std::uint32_t k = 0;
  std::uint32_t delta_n_th = 0;
  Tick c_s = 0;
  Tick c_b = 0;
  std::string seed;  // "mean" on aggregate rows
  std::uint32_t n = 0;
  std::uint32_t m = 0;
  std::uint64_t apps_injected = 0;
  std::uint64_t apps_completed = 0;
  std::optional<double> t_r_mean;
  std::optional<double> speedup;
  double beacons_tx = 0;
  double beacons_rx = 0;
  double msgs_total = 0;
  double global_bus_util = 0;
  double local_bus_util_mean = 0;
};

CsvRow to_row(const RunResult& r);
/// Mean over valid runs of one cell; speedup empty when none is valid.
CsvRow aggregate_row(const std::vector<RunResult>& runs);

struct SweepCell {
  std::size_t index = 0;
  SimConfig config;
  std::vector<RunResult> runs;
};

struct SweepOptions {
  unsigned threads = 0;  // 0: hardware concurrency
};

/// Cartesian product over axes (first axis outermost). Repetition r of cell
/// c runs with derive_seed(base.seed, c, r).
std::vector<SweepCell> sweep(const SimConfig& base, const std::vector<Axis>& axes, SweepOptions opts = {});

/// Per-repetition rows plus one aggregate row per cell when repetitions > 1.
/// Invalid runs (misses) are left out.
std::vector<CsvRow> sweep_rows(const std::vector<SweepCell>& cells);

const std::vector<std::string>& csv_columns();
void write_csv(std::ostream& out, const std::vector<CsvRow>& rows);
/// Throws SimError if the file cannot be written.
void emit_csv(const std::vector<CsvRow>& rows, const std::string& path);

void write_app_csv(std::ostream& out, const RunResult& r);
void write_node_csv(std::ostream& out, const RunResult& r);
/// `tick,mtype,src,dst,prio,flag,words`, addresses as flat node ids.
std::string format_message_line(Tick t, const Message& msg, NodeAddress to, std::size_t words,
                                 const Topology& topo);

std::string format_double(double v);

/// Reference-model parameters matching a simulation config (l = max child
/// length, c_b = tx + rx delay).
analytic::Params model_params(const SimConfig& cfg);
/// Columns: k, c_s, c_b, omega_cmp, omega_msg, speedup_model.
void write_model_csv(std::ostream& out, const analytic::Params& base, const std::vector<std::uint32_t>& ks);

struct CompareRow {
  std::uint32_t k = 0;
  analytic::CurvePoint model;
  std::optional<double> speedup_sim;
};
/// Runs the simulation for every k and pairs it with the model value.
std::vector<CompareRow> compare(const SimConfig& base, const std::vector<std::uint32_t>& ks,
                                SweepOptions opts = {});
/// Columns: k, c_s, c_b, omega_cmp, omega_msg, speedup_model, speedup_sim, rel_error.
void write_compare_csv(std::ostream& out, const SimConfig& base, const std::vector<CompareRow>& rows);

}  // namespace tlmsim

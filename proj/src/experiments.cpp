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


#include "tlmsim/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "tlmsim/rng.hpp"

namespace tlmsim {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::uint64_t parse_uint(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec == std::errc() && ptr == end) return out;
  // Accept scientific notation such as 1e7 when it denotes an integer.
  char* stop = nullptr;
  errno = 0;
  const double d = std::strtod(v.c_str(), &stop);
  if (!v.empty() && stop == v.c_str() + v.size() && errno == 0 && d >= 0 && d < 1.8e19 && std::floor(d) == d) {
    return static_cast<std::uint64_t>(d);
  }
  throw ConfigError("'" + key + "' expects a non-negative integer, got '" + v + "'");
}

std::uint32_t parse_u32(const std::string& key, const std::string& v) {
  const std::uint64_t x = parse_uint(key, v);
  if (x > 0xFFFFFFFFull) throw ConfigError("'" + key + "' is out of range: " + v);
  return static_cast<std::uint32_t>(x);
}

double parse_real(const std::string& key, const std::string& v) {
  char* stop = nullptr;
  const double d = std::strtod(v.c_str(), &stop);
  if (v.empty() || stop != v.c_str() + v.size() || !std::isfinite(d)) {
    throw ConfigError("'" + key + "' expects a number, got '" + v + "'");
  }
  return d;
}

const std::vector<std::string> kKeys = {
    "experiment", "m",           "k",         "global_bus_width", "local_bus_width", "tx_delay",
    "rx_delay",   "c_s",         "base_cost", "sim_length",       "delta_n_th",      "helper_scope",
    "join_wait",  "inject_gmn",  "benchmark", "n",                "max_child_len",   "length_dist",
    "lambda_mean", "arrival", "duty",       "seed",      "repetitions",
};

}  // namespace

void SimConfig::validate() const {
  if (k == 0) throw ConfigError("k is required (number of global management nodes)");
  Topology{m, k}.validate();
  if (global_bus_width == 0 || local_bus_width == 0) throw ConfigError("bus widths must be >= 1");
  if (sim_length == 0) throw ConfigError("sim_length must be >= 1");
  if (delta_n_th == 0) throw ConfigError("delta_n_th must be >= 1");
  if (repetitions == 0) throw ConfigError("repetitions must be >= 1");
  if (bench.max_len == 0) throw ConfigError("max_child_len must be >= 1");
  if (bench.n > 0xFFFF) throw ConfigError("n must fit the 16-bit beacon fields");
  bench.validate();
  if (bench.kind == BenchmarkKind::Independent && inject_gmn >= k) {
    throw ConfigError("inject_gmn must be < k");
  }
}

ChipConfig SimConfig::chip() const {
  ChipConfig c;
  c.topo = Topology{m, k};
  c.global_bus = BusTiming{tx_delay, rx_delay, global_bus_width};
  c.local_bus = BusTiming{tx_delay, rx_delay, local_bus_width};
  c.mapping.m = m;
  c.mapping.k = k;
  c.mapping.c_s = c_s;
  c.mapping.delta_n_th = delta_n_th;
  c.mapping.base_cost = base_cost;
  c.mapping.helper_scope = helper_scope;
  c.mapping.join_wait = join_wait;
  return c;
}

const std::vector<std::string>& config_keys() { return kKeys; }

void apply_setting(SimConfig& cfg, const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (key == "experiment") {
    if (v.empty() || v.find_first_of(",\"\n") != std::string::npos) {
      throw ConfigError("experiment name must be non-empty and free of commas and quotes");
    }
    cfg.experiment = v;
  } else if (key == "m") {
    cfg.m = parse_u32(key, v);
  } else if (key == "k") {
    cfg.k = parse_u32(key, v);
  } else if (key == "global_bus_width") {
    cfg.global_bus_width = parse_u32(key, v);
  } else if (key == "local_bus_width") {
    cfg.local_bus_width = parse_u32(key, v);
  } else if (key == "tx_delay") {
    cfg.tx_delay = parse_uint(key, v);
  } else if (key == "rx_delay") {
    cfg.rx_delay = parse_uint(key, v);
  } else if (key == "c_s") {
    cfg.c_s = parse_uint(key, v);
  } else if (key == "base_cost") {
    cfg.base_cost = parse_uint(key, v);
  } else if (key == "sim_length") {
    cfg.sim_length = parse_uint(key, v);
  } else if (key == "delta_n_th") {
    cfg.delta_n_th = parse_u32(key, v);
  } else if (key == "helper_scope") {
    if (v == "subtree") {
      cfg.helper_scope = HelperScope::Subtree;
    } else if (v == "chip") {
      cfg.helper_scope = HelperScope::Chip;
    } else {
      throw ConfigError("helper_scope must be 'subtree' or 'chip'");
    }
  } else if (key == "join_wait") {
    if (v == "hold") {
      cfg.join_wait = JoinWaitPolicy::Hold;
    } else if (v == "release") {
      cfg.join_wait = JoinWaitPolicy::Release;
    } else if (v == "yield") {
      cfg.join_wait = JoinWaitPolicy::Yield;
    } else {
      throw ConfigError("join_wait must be 'hold', 'release' or 'yield'");
    }
  } else if (key == "inject_gmn") {
    cfg.inject_gmn = parse_u32(key, v);
  } else if (key == "benchmark") {
    if (v == "independent") {
      cfg.bench.kind = BenchmarkKind::Independent;
    } else if (v == "interference") {
      cfg.bench.kind = BenchmarkKind::Interference;
    } else {
      throw ConfigError("benchmark must be 'independent' or 'interference'");
    }
  } else if (key == "n") {
    cfg.bench.n = parse_u32(key, v);
  } else if (key == "max_child_len") {
    cfg.bench.max_len = parse_uint(key, v);
  } else if (key == "length_dist") {
    if (v == "fixed") {
      cfg.bench.len_dist = LengthDist::Fixed;
    } else if (v == "uniform95") {
      cfg.bench.len_dist = LengthDist::Uniform95;
    } else {
      throw ConfigError("length_dist must be 'fixed' or 'uniform95'");
    }
  } else if (key == "lambda_mean") {
    cfg.bench.lambda_mean = parse_real(key, v);
  } else if (key == "arrival") {
    if (v == "poisson") {
      cfg.bench.arrival = ArrivalDist::Poisson;
    } else if (v == "exponential") {
      cfg.bench.arrival = ArrivalDist::Exponential;
    } else {
      throw ConfigError("arrival must be 'poisson' or 'exponential'");
    }
  } else if (key == "duty") {
    cfg.bench.duty = parse_real(key, v);
  } else if (key == "seed") {
    cfg.seed = parse_uint(key, v);
  } else if (key == "repetitions") {
    cfg.repetitions = parse_u32(key, v);
  } else {
    throw ConfigError("unknown configuration key '" + key + "'");
  }
}

std::string get_setting(const SimConfig& cfg, const std::string& key) {
  if (key == "experiment") return cfg.experiment;
  if (key == "m") return std::to_string(cfg.m);
  if (key == "k") return std::to_string(cfg.k);
  if (key == "global_bus_width") return std::to_string(cfg.global_bus_width);
  if (key == "local_bus_width") return std::to_string(cfg.local_bus_width);
  if (key == "tx_delay") return std::to_string(cfg.tx_delay);
  if (key == "rx_delay") return std::to_string(cfg.rx_delay);
  if (key == "c_s") return std::to_string(cfg.c_s);
  if (key == "base_cost") return std::to_string(cfg.base_cost);
  if (key == "sim_length") return std::to_string(cfg.sim_length);
  if (key == "delta_n_th") return std::to_string(cfg.delta_n_th);
  if (key == "helper_scope") return cfg.helper_scope == HelperScope::Subtree ? "subtree" : "chip";
  if (key == "join_wait") {
    switch (cfg.join_wait) {
      case JoinWaitPolicy::Hold: return "hold";
      case JoinWaitPolicy::Release: return "release";
      case JoinWaitPolicy::Yield: return "yield";
    }
  }
  if (key == "inject_gmn") return std::to_string(cfg.inject_gmn);
  if (key == "benchmark") return cfg.bench.kind == BenchmarkKind::Independent ? "independent" : "interference";
  if (key == "n") return std::to_string(cfg.bench.n);
  if (key == "max_child_len") return std::to_string(cfg.bench.max_len);
  if (key == "length_dist") return cfg.bench.len_dist == LengthDist::Fixed ? "fixed" : "uniform95";
  if (key == "lambda_mean") return format_double(cfg.bench.lambda_mean);
  if (key == "arrival") return cfg.bench.arrival == ArrivalDist::Poisson ? "poisson" : "exponential";
  if (key == "duty") return format_double(cfg.bench.duty);
  if (key == "seed") return std::to_string(cfg.seed);
  if (key == "repetitions") return std::to_string(cfg.repetitions);
  throw ConfigError("unknown configuration key '" + key + "'");
}

SimConfig parse_config(const std::string& text, const std::vector<std::pair<std::string, std::string>>& overrides) {
  SimConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(std::string_view(t).substr(0, eq));
    try {
      apply_setting(cfg, key, t.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  for (const auto& [key, value] : overrides) apply_setting(cfg, key, value);
  cfg.validate();
  return cfg;
}

SimConfig load_config(const std::string& path, const std::vector<std::pair<std::string, std::string>>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), overrides);
}

std::optional<double> compute_speedup(const std::vector<AppRecord>& apps) {
  double sum = 0;
  std::size_t done = 0;
  for (const auto& a : apps) {
    if (!a.injected) continue;
    const auto t_r = a.response_time();
    if (!t_r) return std::nullopt;
    if (*t_r == 0) throw InvariantError("application completed with zero response time");
    sum += static_cast<double>(a.sequential_ticks) / static_cast<double>(*t_r);
    ++done;
  }
  if (done == 0) return std::nullopt;
  return sum / static_cast<double>(done);
}

RunResult run_experiment(const SimConfig& cfg, std::uint64_t seed, const RunHooks& hooks) {
  cfg.validate();
  Kernel kernel;
  Chip chip(kernel, cfg.chip());
  if (hooks.on_message) chip.set_message_observer(hooks.on_message);
  if (hooks.on_lifecycle) chip.set_lifecycle_observer(hooks.on_lifecycle);
  if (hooks.on_decision) chip.set_decision_observer(hooks.on_decision);

  Rng rng(seed);
  if (cfg.bench.kind == BenchmarkKind::Independent) {
    AppBundle app;
    app.parent = make_parent_trace(cfg.bench.n);
    for (Tick len : draw_child_lengths(cfg.bench, rng)) app.children.push_back(make_child_trace(len));
    chip.inject(chip.load_app(app), cfg.inject_gmn, 0);
  } else {
    for (const auto& inj : gen_interference_schedule(cfg.bench, cfg.sim_length, cfg.k, rng)) {
      chip.inject(chip.load_app(inj.app), inj.gmn, inj.at);
    }
  }

  const RunStats stats = kernel.run_until(cfg.sim_length);
  if (hooks.on_finish) hooks.on_finish(chip);

  RunResult r;
  r.config = cfg;
  r.seed = seed;
  r.apps = chip.apps();
  r.final_time = stats.final_time;
  r.events = stats.events_processed;
  r.apps_injected = static_cast<std::uint64_t>(
      std::count_if(r.apps.begin(), r.apps.end(), [](const AppRecord& a) { return a.injected; }));
  r.apps_completed = chip.apps_completed();
  r.misses = r.apps_injected - r.apps_completed;
  if (r.apps_completed > 0) {
    double sum = 0;
    for (const auto& a : r.apps) {
      if (const auto t = a.response_time()) sum += static_cast<double>(*t);
    }
    r.t_r_mean = sum / static_cast<double>(r.apps_completed);
  }
  r.speedup = compute_speedup(r.apps);
  r.beacons_tx = chip.beacons_tx();
  r.beacons_rx = chip.beacons_rx();
  r.msgs_total = chip.global_bus().counters().granted;
  const double horizon = static_cast<double>(std::max<Tick>(1, stats.final_time));
  r.global_bus_util = static_cast<double>(chip.global_bus().counters().busy_ticks) / horizon;
  double local = 0;
  for (std::uint32_t g = 0; g < cfg.k; ++g) {
    const auto& c = chip.local_bus(g).counters();
    r.msgs_total += c.granted;
    local += static_cast<double>(c.busy_ticks) / horizon;
  }
  r.local_bus_util_mean = local / cfg.k;
  r.tasks_created = chip.task_table().size();
  for (const auto& t : chip.task_table()) r.helpers += t.kind == TaskKind::Helper ? 1 : 0;
  r.quiescent = chip.quiescent();
  for (std::uint32_t p = 0; p < cfg.m; ++p) {
    const auto& c = chip.pe(p).counters;
    r.nodes.push_back({"pe" + std::to_string(p), c.tasks_started, c.busy_ticks, c.syscalls, 0, 0});
  }
  for (std::uint32_t g = 0; g < cfg.k; ++g) {
    const auto& c = chip.gmn(g).counters;
    r.nodes.push_back({"gmn" + std::to_string(g), 0, 0, 0, c.messages, c.busy_ticks});
  }
  return r;
}

Axis parse_axis(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw ConfigError("axis must look like key=v1,v2 or key=lo..hi");
  Axis axis;
  axis.key = trim(std::string_view(text).substr(0, eq));
  if (std::find(kKeys.begin(), kKeys.end(), axis.key) == kKeys.end()) {
    throw ConfigError("unknown sweep axis '" + axis.key + "'");
  }
  const std::string rest = trim(std::string_view(text).substr(eq + 1));
  if (const auto dots = rest.find(".."); dots != std::string::npos) {
    const std::uint64_t lo = parse_uint(axis.key, trim(rest.substr(0, dots)));
    const std::uint64_t hi = parse_uint(axis.key, trim(rest.substr(dots + 2)));
    if (lo == 0 || lo > hi) throw ConfigError("axis range must satisfy 1 <= lo <= hi");
    for (std::uint64_t v = lo; v <= hi; v *= 2) axis.values.push_back(std::to_string(v));
  } else {
    std::stringstream ss(rest);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (!item.empty()) axis.values.push_back(item);
    }
  }
  if (axis.values.empty()) throw ConfigError("axis '" + axis.key + "' has no values");
  return axis;
}

CsvRow to_row(const RunResult& r) {
  CsvRow row;
  const auto& c = r.config;
  row.experiment = c.experiment;
  row.k = c.k;
  row.delta_n_th = c.delta_n_th;
  row.c_s = c.c_s;
  row.c_b = c.c_b();
  row.seed = std::to_string(r.seed);
  row.n = c.bench.n;
  row.m = c.m;
  row.apps_injected = r.apps_injected;
  row.apps_completed = r.apps_completed;
  row.t_r_mean = r.t_r_mean;
  row.speedup = r.valid() ? r.speedup : std::nullopt;
  row.beacons_tx = static_cast<double>(r.beacons_tx);
  row.beacons_rx = static_cast<double>(r.beacons_rx);
  row.msgs_total = static_cast<double>(r.msgs_total);
  row.global_bus_util = r.global_bus_util;
  row.local_bus_util_mean = r.local_bus_util_mean;
  return row;
}

CsvRow aggregate_row(const std::vector<RunResult>& runs) {
  if (runs.empty()) throw SimError("aggregate over zero runs");
  CsvRow row = to_row(runs.front());
  row.seed = "mean";
  std::size_t valid = 0;
  double inj = 0, done = 0, tr = 0, s = 0, btx = 0, brx = 0, msgs = 0, gu = 0, lu = 0;
  for (const auto& r : runs) {
    if (!r.valid()) continue;
    ++valid;
    inj += static_cast<double>(r.apps_injected);
    done += static_cast<double>(r.apps_completed);
    tr += r.t_r_mean.value_or(0);
    s += r.speedup.value_or(0);
    btx += static_cast<double>(r.beacons_tx);
    brx += static_cast<double>(r.beacons_rx);
    msgs += static_cast<double>(r.msgs_total);
    gu += r.global_bus_util;
    lu += r.local_bus_util_mean;
  }
  if (valid == 0) {
    row.t_r_mean.reset();
    row.speedup.reset();
    return row;
  }
  const double v = static_cast<double>(valid);
  row.apps_injected = static_cast<std::uint64_t>(std::llround(inj / v));
  row.apps_completed = static_cast<std::uint64_t>(std::llround(done / v));
  row.t_r_mean = tr / v;
  row.speedup = s / v;
  row.beacons_tx = btx / v;
  row.beacons_rx = brx / v;
  row.msgs_total = msgs / v;
  row.global_bus_util = gu / v;
  row.local_bus_util_mean = lu / v;
  return row;
}

std::vector<SweepCell> sweep(const SimConfig& base, const std::vector<Axis>& axes, SweepOptions opts) {
  std::vector<SweepCell> cells;
  std::vector<std::size_t> idx(axes.size(), 0);
  for (const auto& a : axes) {
    if (a.values.empty()) return cells;
  }
  for (bool done = false; !done;) {
    SweepCell cell;
    cell.index = cells.size();
    cell.config = base;
    for (std::size_t i = 0; i < axes.size(); ++i) apply_setting(cell.config, axes[i].key, axes[i].values[idx[i]]);
    cell.config.validate();
    cell.runs.resize(cell.config.repetitions);
    cells.push_back(std::move(cell));
    // Odometer increment, last axis fastest.
    for (std::size_t d = axes.size();;) {
      if (d == 0) {
        done = true;
        break;
      }
      --d;
      if (++idx[d] < axes[d].values.size()) break;
      idx[d] = 0;
    }
  }

  std::vector<std::pair<std::size_t, std::size_t>> jobs;
  for (const auto& c : cells) {
    for (std::size_t r = 0; r < c.runs.size(); ++r) jobs.emplace_back(c.index, r);
  }
  unsigned threads = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, jobs.size()));
  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::exception_ptr first_error;
  auto worker = [&] {
    for (std::size_t j; (j = next.fetch_add(1)) < jobs.size();) {
      const auto [c, r] = jobs[j];
      try {
        const auto seed = derive_seed(base.seed, c, r);
        cells[c].runs[r] = run_experiment(cells[c].config, seed);
      } catch (...) {
        std::lock_guard lock(err_mu);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  return cells;
}

std::vector<CsvRow> sweep_rows(const std::vector<SweepCell>& cells) {
  std::vector<CsvRow> rows;
  for (const auto& c : cells) {
    for (const auto& r : c.runs) {
      if (r.valid()) rows.push_back(to_row(r));
    }
    if (c.runs.size() > 1) {
      const CsvRow agg = aggregate_row(c.runs);
      if (agg.speedup) rows.push_back(agg);
    }
  }
  return rows;
}

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = {
      "experiment",     "k",         "delta_n_th", "c_s",        "c_b",        "seed",
      "n",              "m",         "apps_injected", "apps_completed", "t_r_mean", "speedup",
      "beacons_tx",     "beacons_rx", "msgs_total", "global_bus_util", "local_bus_util_mean",
  };
  return cols;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  std::string s = buf;
  const auto dot = s.find('.');
  if (dot != std::string::npos) {
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
  }
  if (s == "-0") s = "0";
  return s;
}

void write_csv(std::ostream& out, const std::vector<CsvRow>& rows) {
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  for (const auto& r : rows) {
    out << r.experiment << ',' << r.k << ',' << r.delta_n_th << ',' << r.c_s << ',' << r.c_b << ',' << r.seed << ','
        << r.n << ',' << r.m << ',' << r.apps_injected << ',' << r.apps_completed << ',' << opt(r.t_r_mean) << ','
        << opt(r.speedup) << ',' << format_double(r.beacons_tx) << ',' << format_double(r.beacons_rx) << ','
        << format_double(r.msgs_total) << ',' << format_double(r.global_bus_util) << ','
        << format_double(r.local_bus_util_mean) << '\n';
  }
}

void emit_csv(const std::vector<CsvRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_csv(out, rows);
  out.flush();
  if (!out) throw IoError("write to '" + path + "' failed");
}

void write_app_csv(std::ostream& out, const RunResult& r) {
  out << "app_id,inject_tick,complete_tick,response_time,n_children,miss\n";
  for (const auto& a : r.apps) {
    if (!a.injected) continue;
    out << a.id << ',' << a.inject_tick << ',';
    if (a.complete_tick) {
      out << *a.complete_tick << ',' << *a.response_time() << ',' << a.n_children << ",0\n";
    } else {
      out << ",," << a.n_children << ",1\n";
    }
  }
}

void write_node_csv(std::ostream& out, const RunResult& r) {
  out << "node,tasks_executed,busy_ticks,syscalls,messages_handled,handler_busy_ticks\n";
  for (const auto& n : r.nodes) {
    out << n.node << ',' << n.tasks_executed << ',' << n.busy_ticks << ',' << n.syscalls << ','
        << n.messages_handled << ',' << n.handler_busy_ticks << '\n';
  }
}

std::string format_message_line(Tick t, const Message& msg, NodeAddress to, std::size_t words,
                                const Topology& topo) {
  std::ostringstream os;
  os << t << ',' << to_string(msg.type) << ',' << topo.flat_id(msg.src) << ',' << topo.flat_id(to) << ','
     << static_cast<unsigned>(msg.prio) << ',' << (msg.broadcast ? 1 : 0) << ',' << words;
  return os.str();
}

analytic::Params model_params(const SimConfig& cfg) {
  analytic::Params p;
  p.m = cfg.m;
  p.n = cfg.bench.n;
  p.k = cfg.k ? cfg.k : 1;
  p.l = static_cast<double>(cfg.bench.max_len);
  p.c_s = static_cast<double>(cfg.c_s);
  p.c_b = static_cast<double>(cfg.c_b());
  return p;
}

void write_model_csv(std::ostream& out, const analytic::Params& base, const std::vector<std::uint32_t>& ks) {
  out << "k,c_s,c_b,omega_cmp,omega_msg,speedup_model\n";
  for (const auto& pt : analytic::model_curve(base, ks)) {
    out << format_double(pt.k) << ',' << format_double(base.c_s) << ',' << format_double(base.c_b) << ','
        << format_double(pt.omega_cmp) << ',' << format_double(pt.omega_msg) << ',' << format_double(pt.speedup)
        << '\n';
  }
}

std::vector<CompareRow> compare(const SimConfig& base, const std::vector<std::uint32_t>& ks, SweepOptions opts) {
  Axis axis{"k", {}};
  for (auto k : ks) axis.values.push_back(std::to_string(k));
  SimConfig cfg = base;
  if (cfg.k == 0) cfg.k = 1;
  const auto cells = sweep(cfg, {axis}, opts);
  const auto curve = analytic::model_curve(model_params(cfg), ks);
  std::vector<CompareRow> rows;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    CompareRow row{ks[i], curve[i], std::nullopt};
    const CsvRow agg = cells[i].runs.size() > 1 ? aggregate_row(cells[i].runs) : to_row(cells[i].runs.front());
    row.speedup_sim = agg.speedup;
    rows.push_back(row);
  }
  return rows;
}

void write_compare_csv(std::ostream& out, const SimConfig& base, const std::vector<CompareRow>& rows) {
  out << "k,c_s,c_b,omega_cmp,omega_msg,speedup_model,speedup_sim,rel_error\n";
  for (const auto& r : rows) {
    out << r.k << ',' << base.c_s << ',' << base.c_b() << ',' << format_double(r.model.omega_cmp) << ','
        << format_double(r.model.omega_msg) << ',' << format_double(r.model.speedup) << ',';
    if (r.speedup_sim) {
      out << format_double(*r.speedup_sim) << ','
          << format_double((*r.speedup_sim - r.model.speedup) / r.model.speedup);
    } else {
      out << ',';
    }
    out << '\n';
  }
}

}  // namespace tlmsim

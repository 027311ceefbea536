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


// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "tlmsim/analytic.hpp"
#include "tlmsim/experiments.hpp"
#include "tlmsim/rng.hpp"

using namespace tlmsim;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
  std::printf("%s criterion %d (%s): %s\n", ok ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(double v, int prec = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

SimConfig base_config(const std::string& text) { return parse_config(text); }

// Mean speedup per cell of a k sweep, valid runs only. Empty optional when a
// cell has no valid run.
std::vector<std::optional<double>> mean_speedups(const std::vector<SweepCell>& cells) {
  std::vector<std::optional<double>> out;
  for (const auto& c : cells) out.push_back(aggregate_row(c.runs).speedup);
  return out;
}

double mean_of(const std::vector<RunResult>& runs, const std::function<double(const RunResult&)>& f) {
  double s = 0;
  for (const auto& r : runs) s += f(r);
  return s / static_cast<double>(runs.size());
}

std::string show(const std::optional<double>& v) { return v ? fmt(*v, 1) : std::string("suppressed"); }

// 1. Independent tasks, n = 100.
void criterion_table() {
  const std::vector<std::uint32_t> ks{16, 8, 256, 1};
  const std::vector<double> ref{78.7, 73.5, 44.3, 28.1};
  Axis axis{"k", {}};
  for (auto k : ks) axis.values.push_back(std::to_string(k));
  const auto cells = sweep(base_config("k = 1\nn = 100"), {axis});
  const auto s = mean_speedups(cells);
  bool all = std::all_of(s.begin(), s.end(), [](const auto& v) { return v.has_value(); });
  bool order = all && *s[0] > *s[1] && *s[1] > *s[2] && *s[2] > *s[3];
  bool within = all;
  std::string detail;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const bool ok = s[i] && std::abs(*s[i] - ref[i]) <= 0.2 * ref[i];
    within = within && ok;
    detail += "k=" + std::to_string(ks[i]) + " S=" + show(s[i]) + " (ref " + fmt(ref[i], 1) + (ok ? "" : ", off") + ") ";
  }
  detail += order ? "ordering holds" : "ordering broken";
  report(1, "n=100 ordering and magnitudes", order && within, detail);
}

// 2. Analytic optimum through the CLI.
void criterion_model() {
  const std::string out = "acceptance_model.csv";
  const std::string cmd = std::string(TLMSIM_CLI) + " model --set m=256 --set n=256 --set c_s=8 --set tx_delay=4 " +
                          "--set rx_delay=4 --out " + out;
  const int rc = std::system(cmd.c_str());
  if (!WIFEXITED(rc) || WEXITSTATUS(rc) != 0) {
    report(2, "analytic optimum", false, "model subcommand failed");
    return;
  }
  std::ifstream in(out);
  std::string line;
  std::getline(in, line);
  double best = -1;
  std::uint32_t arg = 0;
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string x; std::getline(ss, x, ',');) f.push_back(x);
    const double s = std::stod(f.at(5));
    if (s > best) {
      best = s;
      arg = static_cast<std::uint32_t>(std::stoul(f.at(0)));
    }
  }
  std::remove(out.c_str());
  report(2, "analytic optimum", arg == 32 || arg == 64, "argmax k=" + std::to_string(arg) + " S=" + fmt(best, 1));
}

// 3. Simulation against the closed form, m = n = 256.
void criterion_model_fit() {
  const auto base = base_config("k = 1\nn = 256");
  const auto grid = analytic::power_of_two_grid(256);
  const auto rows = compare(base, grid);
  bool ok = true;
  std::string detail;
  for (const auto& r : rows) {
    const bool cell = r.speedup_sim && std::abs(*r.speedup_sim - r.model.speedup) <= 0.25 * r.model.speedup;
    ok = ok && cell;
    detail += "k=" + std::to_string(r.k) + " " + show(r.speedup_sim) + "/" + fmt(r.model.speedup, 1) +
              (cell ? "" : "(off)") + " ";
  }
  report(3, "model vs simulation within 25%", ok, detail);
}

constexpr std::uint32_t kSeeds = 10;

SimConfig interference(std::uint32_t k, std::uint32_t delta) {
  return base_config("benchmark = interference\nlength_dist = uniform95\nrepetitions = " + std::to_string(kSeeds) +
                     "\nk = " + std::to_string(k) + "\ndelta_n_th = " + std::to_string(delta));
}

std::map<std::uint32_t, std::vector<RunResult>> interference_runs;

const std::vector<RunResult>& interference_for(std::uint32_t k) {
  auto it = interference_runs.find(k);
  if (it == interference_runs.end()) {
    it = interference_runs.emplace(k, sweep(interference(k, 4), {}).front().runs).first;
  }
  return it->second;
}

// 4. Interference improvement factors.
void criterion_interference() {
  std::map<std::uint32_t, std::optional<double>> s;
  std::string detail;
  for (std::uint32_t k : {1u, 16u, 256u}) {
    s[k] = aggregate_row(interference_for(k)).speedup;
    std::size_t invalid = 0;
    for (const auto& r : interference_for(k)) invalid += r.valid() ? 0 : 1;
    detail += "S(k=" + std::to_string(k) + ")=" + show(s[k]) + (invalid ? " [" + std::to_string(invalid) + " runs missed]" : "") + " ";
  }
  bool ok = s[1] && s[16] && s[256];
  if (ok) {
    const double r16 = *s[16] / *s[1];
    const double r256 = *s[256] / *s[1];
    detail += "ratio16=" + fmt(r16) + " (want 2.2..3.4) ratio256=" + fmt(r256) + " (want 1.2..2.0)";
    ok = r16 >= 2.2 && r16 <= 3.4 && r256 >= 1.2 && r256 <= 2.0;
  }
  report(4, "interference improvement factors", ok, detail);
}

// 5. Beacon volume k=32 over k=16.
void criterion_beacons() {
  const double b16 = mean_of(interference_for(16), [](const RunResult& r) { return double(r.beacons_tx); });
  const double b32 = mean_of(interference_for(32), [](const RunResult& r) { return double(r.beacons_tx); });
  const double ratio = b32 / b16;
  report(5, "beacon volume ratio", ratio >= 1.15 && ratio <= 1.6,
         "beacons_tx k=16 " + fmt(b16, 0) + ", k=32 " + fmt(b32, 0) + ", ratio " + fmt(ratio) + " (want 1.15..1.6)");
}

// 6. Threshold robustness at k=16.
void criterion_threshold() {
  Axis axis{"delta_n_th", {"1", "2", "4", "8", "16", "32"}};
  const auto cells = sweep(interference(16, 4), {axis});
  const auto s = mean_speedups(cells);
  std::string detail;
  for (std::size_t i = 0; i < s.size(); ++i) detail += "d=" + axis.values[i] + ":" + show(s[i]) + " ";
  bool ok = std::all_of(s.begin(), s.end(), [](const auto& v) { return v.has_value(); });
  if (ok) {
    const double lo = std::min({*s[0], *s[1], *s[2], *s[3]});
    const double hi = std::max({*s[0], *s[1], *s[2], *s[3]});
    const double spread = (hi - lo) / hi;
    const double drop16 = 1 - *s[4] / hi;
    const double drop32 = 1 - *s[5] / hi;
    detail += "plateau spread " + fmt(100 * spread, 1) + "% (<15), drop at 16 " + fmt(100 * drop16, 1) +
              "%, at 32 " + fmt(100 * drop32, 1) + "% (>15)";
    ok = spread < 0.15 && drop16 > 0.15 && drop32 > 0.15;
  }
  report(6, "threshold robustness", ok, detail);
}

// 7a. Replays every lifecycle event of a run and checks it against a model of
// the legal task, PE and barrier states.
class LifecycleOracle {
 public:
  explicit LifecycleOracle(std::uint32_t m) : pe_task_(m, kNoTask) {}

  void on(const LifecycleEvent& ev) {
    switch (ev.kind) {
      case LifecycleKind::Created:
        check(!created_.contains(ev.task), "task created twice");
        created_.insert(ev.task);
        break;
      case LifecycleKind::Mapped:
        check(!mapped_.contains(ev.task), "task mapped twice");
        mapped_[ev.task] = ev.value;
        break;
      case LifecycleKind::Parked:
        break;
      case LifecycleKind::PeStart:
        check(ev.value < pe_task_.size(), "PE out of range");
        check(pe_task_[ev.value] == kNoTask, "PE started while busy");
        check(mapped_.contains(ev.task) && mapped_[ev.task] == ev.value, "task started off its mapped PE");
        check(!terminated_.contains(ev.task), "terminated task restarted");
        pe_task_[ev.value] = ev.task;
        start_[ev.task] = ev.at;
        ++starts_;
        break;
      case LifecycleKind::PeStop:
        check(pe_task_.at(ev.value) == ev.task, "PE stopped a task it was not running");
        pe_task_[ev.value] = kNoTask;
        busy_[ev.task] += ev.at - start_[ev.task];
        break;
      case LifecycleKind::Suspended:
        check(!waiting_.contains(ev.task), "task suspended twice");
        waiting_[ev.task] = ev.value;
        break;
      case LifecycleKind::Terminated:
        check(!terminated_.contains(ev.task), "task terminated twice");
        for (std::uint32_t t : pe_task_) check(t != ev.task, "task terminated while on a PE");
        terminated_.insert(ev.task);
        break;
      case LifecycleKind::BarrierInit:
        check(!count_.contains(ev.value), "barrier address in use");
        count_[ev.value] = ev.aux;
        break;
      case LifecycleKind::BarrierDecrement:
        check(count_.contains(ev.value), "decrement of unknown barrier");
        check(count_[ev.value] > 0, "barrier count below zero");
        --count_[ev.value];
        check(count_[ev.value] == ev.aux, "reported count disagrees");
        break;
      case LifecycleKind::BarrierRelease:
        check(count_.contains(ev.value) && count_[ev.value] == 0, "waiter released on an open barrier");
        check(waiting_.contains(ev.task) && waiting_[ev.task] == ev.value, "released task was not waiting");
        waiting_.erase(ev.task);
        break;
      case LifecycleKind::BarrierFree:
        check(count_.contains(ev.value) && count_[ev.value] == 0, "freed an open barrier");
        for (const auto& [t, a] : waiting_) check(a != ev.value, "freed a barrier with waiters");
        count_.erase(ev.value);
        break;
    }
  }

  void check(bool cond, const char* what) {
    if (!cond && error_.empty()) error_ = what;
  }

  std::string error_;
  std::vector<TaskId> pe_task_;
  std::set<TaskId> created_, terminated_;
  std::map<TaskId, std::uint32_t> mapped_;
  std::map<TaskId, Tick> start_, busy_;
  std::map<TaskId, std::uint32_t> waiting_;
  std::map<std::uint32_t, std::uint32_t> count_;
  std::uint64_t starts_ = 0;
};

std::string property_conservation() {
  Rng rng(2026);
  int held = 0;
  const char* policies[] = {"hold", "release", "yield"};
  const char* scopes[] = {"subtree", "chip"};
  for (int trial = 0; trial < 400; ++trial) {
    const std::uint32_t m = 1u << rng.below(4);  // 1..8
    std::vector<std::uint32_t> ks;
    for (std::uint32_t k = 1; k <= std::min(m, 4u); k *= 2) ks.push_back(k);
    const std::uint32_t k = ks[rng.below(ks.size())];

    SimConfig cfg = parse_config("k = " + std::to_string(k) + "\nm = " + std::to_string(m));
    const std::string policy = policies[rng.below(3)];
    apply_setting(cfg, "join_wait", policy);
    apply_setting(cfg, "helper_scope", scopes[rng.below(2)]);
    apply_setting(cfg, "delta_n_th", std::to_string(1 + rng.below(3)));
    ChipConfig cc = cfg.chip();

    Kernel kernel;
    Chip chip(kernel, cc);
    LifecycleOracle oracle(m);
    chip.set_lifecycle_observer([&](const LifecycleEvent& ev) { oracle.on(ev); });

    const auto apps = 1 + rng.below(4);
    std::map<TaskId, Tick> child_len;  // filled after the run from the trace library
    std::uint64_t expected_children = 0;
    for (std::uint64_t a = 0; a < apps; ++a) {
      const auto n = static_cast<std::uint32_t>(1 + rng.below(8));
      AppBundle b;
      b.parent = make_parent_trace(n);
      for (std::uint32_t i = 0; i < n; ++i) b.children.push_back(make_child_trace(1 + rng.below(200)));
      expected_children += n;
      chip.inject(chip.load_app(b), static_cast<std::uint32_t>(rng.below(k)), rng.below(500));
    }
    kernel.run_until(50'000'000);

    auto fail = [&](const std::string& why) {
      return "trial " + std::to_string(trial) + " (m=" + std::to_string(m) + " k=" + std::to_string(k) + "): " + why;
    };
    if (!oracle.error_.empty()) return fail(oracle.error_);
    // A holding parent can starve its own children, so only safety is checked.
    if (policy == "hold") {
      ++held;
      continue;
    }
    if (chip.apps_completed() != apps) return fail("not every application completed");
    if (!chip.quiescent()) return fail("chip not quiescent after draining");

    std::uint64_t children = 0, terminated = 0;
    for (const auto& t : chip.task_table()) {
      if (!oracle.terminated_.contains(t.id)) return fail("task never terminated");
      ++terminated;
      if (t.kind != TaskKind::Child) continue;
      ++children;
      // A child occupies its PE for exactly its trace length.
      const Tick len = chip.library().program(t.program, t.variant).compute_ticks();
      if (oracle.busy_[t.id] != len) return fail("child busy time differs from its length");
    }
    if (children != expected_children) return fail("child count differs from the workload");
    if (terminated != chip.task_table().size()) return fail("task accounting mismatch");
    if (!oracle.count_.empty()) return fail("barrier left allocated");
    if (!oracle.waiting_.empty()) return fail("waiter never released");
    for (const auto& app : chip.apps()) {
      const auto& parent = chip.task_table().begin()[app.parent];
      for (const auto& t : chip.task_table()) {
        if (t.app == app.id && t.kind == TaskKind::Child && t.end_time > parent.end_time) {
          return fail("parent finished before one of its children");
        }
      }
    }
  }
  std::printf("info: 400 random workloads, %d checked for completion\n", 400 - held);
  return held < 400 ? std::string() : "no trial exercised liveness";
}

std::string property_min_search() {
  std::uint64_t checked = 0;
  const std::vector<std::string> configs = {
      "k = 16\nn = 256",
      "k = 4\nn = 100\nhelper_scope = chip",
      "k = 64\nn = 100",
      "k = 16\nbenchmark = interference\nlength_dist = uniform95\nsim_length = 400000",
      "k = 8\nbenchmark = interference\nhelper_scope = chip\nsim_length = 300000",
  };
  for (const auto& text : configs) {
    const auto cfg = parse_config(text);
    std::string error;
    RunHooks hooks;
    hooks.on_decision = [&](const MappingDecision& d) {
      ++checked;
      const auto& v = d.candidates;
      if (d.stage == MappingDecision::Stage::Global) {
        std::size_t best = d.range_lo;
        for (std::size_t j = 1; j < d.range_len; ++j) {
          const std::size_t c = (d.range_lo + j) % v.size();
          if (v[c] < v[best]) best = c;
        }
        if (!d.chosen || *d.chosen != best) error = "global decision differs from linear scan";
      } else {
        std::optional<std::uint32_t> best;
        for (std::uint32_t j = 0; j < v.size(); ++j) {
          if (v[j] == 0) {
            best = j;
            break;
          }
        }
        if (d.chosen != best) error = "local decision differs from linear scan";
      }
    };
    run_experiment(cfg, cfg.seed, hooks);
    if (!error.empty()) return error + " (" + text.substr(0, text.find('\n')) + ")";
  }
  std::printf("info: %llu mapping decisions checked\n", static_cast<unsigned long long>(checked));
  return checked > 1000 ? std::string() : "too few decisions observed";
}

std::string property_broadcast() {
  for (std::uint32_t k : {2u, 4u, 16u, 64u, 256u}) {
    for (const char* bench : {"independent", "interference"}) {
      auto cfg = parse_config("k = " + std::to_string(k) + "\nbenchmark = " + bench + "\nsim_length = 200000");
      const auto r = run_experiment(cfg);
      if (r.beacons_rx != r.beacons_tx * (k - 1)) {
        return "k=" + std::to_string(k) + " " + bench + ": rx " + std::to_string(r.beacons_rx) + " != tx*(k-1)";
      }
      if (r.beacons_tx == 0) return "k=" + std::to_string(k) + " " + bench + ": no beacons";
    }
  }
  return {};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string property_csv_identical() {
  const std::string a = "acceptance_a.csv", b = "acceptance_b.csv";
  const std::string args = " sweep --set benchmark=interference --set sim_length=300000 --set repetitions=2 "
                           "--set seed=77 --axis k=1,16 --axis delta_n_th=2,8 --out ";
  for (const auto& path : {a, b}) {
    const int rc = std::system((std::string(TLMSIM_CLI) + args + path).c_str());
    if (!WIFEXITED(rc) || WEXITSTATUS(rc) != 0) return "sweep subcommand failed";
  }
  const std::string x = slurp(a), y = slurp(b);
  std::remove(a.c_str());
  std::remove(b.c_str());
  if (x.empty() || std::count(x.begin(), x.end(), '\n') < 2) return "empty CSV";
  return x == y ? std::string() : "CSV files differ";
}

std::string property_round_trip() {
  Rng rng(4242);
  for (int i = 0; i < 10000; ++i) {
    const std::uint32_t m = 1 + static_cast<std::uint32_t>(rng.below(70000));
    std::uint32_t k = 1 + static_cast<std::uint32_t>(rng.below(std::min<std::uint32_t>(m, 64)));
    while (m % k) --k;
    const Topology topo{m, k};
    const auto type = static_cast<MessageType>(rng.below(kMessageTypeCount));
    std::vector<std::uint32_t> data(schema_words(type));
    for (auto& w : data) w = static_cast<std::uint32_t>(rng.next_u64());
    auto node = [&] {
      return topo.address(static_cast<std::uint32_t>(rng.below(topo.num_nodes())));
    };
    const bool bc = type == MessageType::StatusBeacon && rng.below(2);
    const auto msg = make_message(type, node(), node(), static_cast<std::uint8_t>(rng.below(16)), bc, data);
    const auto words = encode(msg, topo);
    if (words.size() != message_word_count(msg, topo.num_nodes())) return "encoded length differs from word count";
    if (!(decode(words, topo) == msg)) return "round trip changed message " + std::to_string(i);
  }
  return {};
}

void criterion_properties() {
  const std::vector<std::pair<std::string, std::function<std::string()>>> suites = {
      {"a conservation/barriers", property_conservation},
      {"b min-search", property_min_search},
      {"c broadcast completeness", property_broadcast},
      {"d byte-identical CSV", property_csv_identical},
      {"e encode/decode", property_round_trip},
  };
  bool ok = true;
  std::string detail;
  for (const auto& [name, fn] : suites) {
    std::string err;
    try {
      err = fn();
    } catch (const std::exception& e) {
      err = std::string("exception: ") + e.what();
    }
    detail += name + (err.empty() ? " ok; " : " FAILED: " + err + "; ");
    ok = ok && err.empty();
  }
  report(7, "property suites", ok, detail);
}

}  // namespace

// Optional arguments select criteria by number; none runs all of them.
int main(int argc, char** argv) {
  std::set<std::size_t> only;
  for (int i = 1; i < argc; ++i) only.insert(std::strtoul(argv[i], nullptr, 10));
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<std::function<void()>> steps = {criterion_table,        criterion_model,   criterion_model_fit,
                                                    criterion_interference, criterion_beacons, criterion_threshold,
                                                    criterion_properties};
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (!only.empty() && !only.contains(i + 1)) continue;
    try {
      steps[i]();
    } catch (const std::exception& e) {
      report(static_cast<int>(i + 1), "aborted", false, e.what());
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%d of %zu criteria failed (%.0f s)\n", failures, only.empty() ? steps.size() : only.size(), secs);
  return failures ? 1 : 0;
}

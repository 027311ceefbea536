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


#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "tlmsim/experiments.hpp"
#include "tlmsim/rng.hpp"

using namespace tlmsim;

namespace {

// 1 covers every user-side problem: bad config, unreadable or unwritable files.
enum Exit : int { kOk = 0, kConfig = 1, kInvariant = 2, kSuppressed = 3 };

struct Common {
  std::string config;
  std::vector<std::string> sets;
  std::string out;
  unsigned threads = 0;
};

using Overrides = std::vector<std::pair<std::string, std::string>>;

Overrides split_sets(const std::vector<std::string>& sets) {
  Overrides ov;
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
    ov.emplace_back(s.substr(0, eq), s.substr(eq + 1));
  }
  return ov;
}

SimConfig load(const Common& c, Overrides extra = {}) {
  Overrides ov = std::move(extra);
  for (auto& kv : split_sets(c.sets)) ov.push_back(std::move(kv));
  return c.config.empty() ? parse_config("", ov) : load_config(c.config, ov);
}

// Writes to the named file, or stdout for "" and "-".
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw IoError("cannot open '" + path + "' for writing");
  }
  std::ostream& os() { return file_ ? *file_ : std::cout; }
  void close() {
    if (!file_) return;
    file_->close();
    if (!*file_) throw IoError("write to output file failed");
  }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::vector<std::uint32_t> k_grid(const std::vector<std::uint32_t>& ks, std::uint32_t m) {
  if (!ks.empty()) return ks;
  return analytic::power_of_two_grid(m);
}

int cmd_run(const Common& c, const std::string& apps_csv, const std::string& nodes_csv,
            const std::string& trace_out) {
  const SimConfig cfg = load(c);
  std::unique_ptr<Sink> trace;
  RunHooks hooks;
  if (!trace_out.empty()) {
    trace = std::make_unique<Sink>(trace_out);
    const Topology topo{cfg.m, cfg.k};
    hooks.on_message = [&trace, topo](Tick t, const Message& msg, NodeAddress to, std::size_t words) {
      trace->os() << format_message_line(t, msg, to, words, topo) << '\n';
    };
  }
  std::vector<RunResult> runs;
  for (std::uint32_t r = 0; r < cfg.repetitions; ++r) {
    // Only the first repetition feeds the trace dump.
    runs.push_back(run_experiment(cfg, derive_seed(cfg.seed, 0, r), r == 0 ? hooks : RunHooks{}));
  }
  if (trace) trace->close();
  if (!apps_csv.empty()) {
    Sink s(apps_csv);
    write_app_csv(s.os(), runs.front());
    s.close();
  }
  if (!nodes_csv.empty()) {
    Sink s(nodes_csv);
    write_node_csv(s.os(), runs.front());
    s.close();
  }
  SweepCell cell{0, cfg, std::move(runs)};
  const auto rows = sweep_rows({cell});
  Sink out(c.out);
  write_csv(out.os(), rows);
  out.close();
  for (const auto& r : cell.runs) {
    if (!r.valid()) std::cerr << "tlmsim: seed " << r.seed << ": " << r.misses << " missed application(s)\n";
  }
  return rows.empty() ? kSuppressed : kOk;
}

int cmd_sweep(const Common& c, const std::vector<std::string>& axis_specs) {
  std::vector<Axis> axes;
  Overrides extra;
  for (const auto& spec : axis_specs) {
    axes.push_back(parse_axis(spec));
    // The base config must validate before the axis overrides it.
    if (axes.back().key == "k") extra.emplace_back("k", axes.back().values.front());
  }
  const SimConfig base = load(c, extra);
  const auto cells = sweep(base, axes, SweepOptions{c.threads});
  const auto rows = sweep_rows(cells);
  Sink out(c.out);
  write_csv(out.os(), rows);
  out.close();
  std::size_t suppressed = 0;
  for (const auto& cell : cells) {
    bool any = false;
    for (const auto& r : cell.runs) any = any || r.valid();
    suppressed += any ? 0 : 1;
  }
  if (suppressed) std::cerr << "tlmsim: " << suppressed << " of " << cells.size() << " cell(s) suppressed\n";
  return !cells.empty() && suppressed == cells.size() ? kSuppressed : kOk;
}

int cmd_model(const Common& c, const std::vector<std::uint32_t>& ks) {
  const SimConfig cfg = load(c, {{"k", "1"}});
  analytic::Params p = model_params(cfg);
  p.validate();
  Sink out(c.out);
  write_model_csv(out.os(), p, k_grid(ks, cfg.m));
  out.close();
  return kOk;
}

int cmd_compare(const Common& c, const std::vector<std::uint32_t>& ks) {
  const SimConfig cfg = load(c, {{"k", "1"}});
  const auto rows = compare(cfg, k_grid(ks, cfg.m), SweepOptions{c.threads});
  Sink out(c.out);
  write_compare_csv(out.os(), cfg, rows);
  out.close();
  bool any = false;
  for (const auto& r : rows) any = any || r.speedup_sim.has_value();
  return any ? kOk : kSuppressed;
}

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("-c,--config", c.config, "key = value configuration file");
  sub->add_option("-s,--set", c.sets, "override one setting, key=value (repeatable)");
  sub->add_option("-o,--out", c.out, "CSV output path (default: stdout)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tlmsim: transaction-level many-core task management simulator"};
  app.require_subcommand(1);

  Common run_c, sweep_c, model_c, compare_c;
  std::string apps_csv, nodes_csv, trace_out;
  std::vector<std::string> axes;
  std::vector<std::uint32_t> model_ks, compare_ks;

  auto* run = app.add_subcommand("run", "simulate one configuration");
  add_common(run, run_c);
  run->add_option("--apps-csv", apps_csv, "per-application CSV of the first repetition");
  run->add_option("--nodes-csv", nodes_csv, "per-node CSV of the first repetition");
  run->add_option("--trace-out", trace_out, "message dump of the first repetition, '-' for stdout");

  auto* sw = app.add_subcommand("sweep", "Cartesian sweep over configuration axes");
  add_common(sw, sweep_c);
  sw->add_option("-a,--axis", axes, "key=v1,v2,... or key=lo..hi (powers of two)")->required();
  sw->add_option("-j,--threads", sweep_c.threads, "worker threads (default: all cores)");

  auto* model = app.add_subcommand("model", "analytic speedup curve over k");
  add_common(model, model_c);
  model->add_option("-k,--k", model_ks, "cluster counts (default: powers of two up to m)")->delimiter(',');

  auto* cmp = app.add_subcommand("compare", "analytic curve joined with simulated speedup");
  add_common(cmp, compare_c);
  cmp->add_option("-k,--k", compare_ks, "cluster counts (default: powers of two up to m)")->delimiter(',');
  cmp->add_option("-j,--threads", compare_c.threads, "worker threads (default: all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    if (*run) return cmd_run(run_c, apps_csv, nodes_csv, trace_out);
    if (*sw) return cmd_sweep(sweep_c, axes);
    if (*model) return cmd_model(model_c, model_ks);
    if (*cmp) return cmd_compare(compare_c, compare_ks);
  } catch (const ConfigError& e) {
    std::cerr << "tlmsim: config error: " << e.what() << '\n';
    return kConfig;
  } catch (const IoError& e) {
    std::cerr << "tlmsim: " << e.what() << '\n';
    return kConfig;
  } catch (const TraceError& e) {
    std::cerr << "tlmsim: trace error: " << e.what() << '\n';
    return kConfig;
  } catch (const SimError& e) {
    std::cerr << "tlmsim: invariant breach: " << e.what() << '\n';
    return kInvariant;
  }
  return kOk;
}

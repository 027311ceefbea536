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
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tlmsim/errors.hpp"
#include "tlmsim/rng.hpp"

namespace tlmsim {

// Trace language, one step per line:
//
//   task <label>:                         starts a named trace
//   compute <ticks>
//   mem <ticks>                           executed like compute
//   syscall <name> <arg>* [-> $r<idx>]    arg: integer | $r<idx> | @<label>
//   # ...                                 comment
//
// A trace ends with a terminating syscall (rcsv-exit or join-exit).

inline constexpr std::size_t kRegisterCount = 8;

enum class Syscall : std::uint8_t { RcsvSpwn, RcsvExit, JoinInit, JoinFree, JoinWait, JoinExit };

std::string_view to_string(Syscall s);
std::optional<Syscall> syscall_from_name(std::string_view name);
std::size_t syscall_arity(Syscall s);
bool is_terminating(Syscall s);

struct RegRef {
  std::uint8_t index = 0;
  bool operator==(const RegRef&) const = default;
};
struct LabelRef {
  std::string name;
  bool operator==(const LabelRef&) const = default;
};
using TraceArg = std::variant<std::uint32_t, RegRef, LabelRef>;

struct ComputeStep {
  Tick ticks = 0;
  bool operator==(const ComputeStep&) const = default;
};
struct MemStep {
  Tick ticks = 0;
  bool operator==(const MemStep&) const = default;
};
struct SyscallStep {
  Syscall call = Syscall::RcsvExit;
  std::vector<TraceArg> args;
  std::optional<std::uint8_t> result_reg;
  bool operator==(const SyscallStep&) const = default;
};
using TraceStep = std::variant<ComputeStep, MemStep, SyscallStep>;

struct TraceProgram {
  std::string name;
  std::vector<TraceStep> steps;

  /// Total ticks of compute and mem steps.
  Tick compute_ticks() const;
  bool operator==(const TraceProgram&) const = default;
};

/// Parses text holding at most one trace. Throws TraceError.
TraceProgram parse_trace(std::string_view text);
/// Parses text holding any number of `task <label>:` sections.
std::vector<TraceProgram> parse_trace_file(std::string_view text);
/// Checks step invariants (non-empty, arity, terminating last step).
void validate(const TraceProgram& program);
std::string print_trace(const TraceProgram& program);

/// Replaces every @label with the integer the resolver returns.
TraceProgram resolve_labels(const TraceProgram& program,
                            const std::function<std::uint32_t(const std::string&)>& resolver);

using FamilyId = std::uint32_t;

/// Loaded programs. A family groups the variants spawned by one rcsv-spwn
/// (children of one application may differ in length); variant i is used by
/// the i-th spawned task, wrapping around.
class TraceLibrary {
 public:
  FamilyId add_family(std::vector<TraceProgram> variants);
  const TraceProgram& program(FamilyId family, std::uint32_t variant) const;
  std::size_t family_size(FamilyId family) const;
  std::size_t families() const noexcept { return families_.size(); }

 private:
  std::vector<std::vector<TraceProgram>> families_;
};

/// One application: a parent trace that references its children as @child.
struct AppBundle {
  TraceProgram parent;
  std::vector<TraceProgram> children;

  std::uint32_t n_children() const noexcept { return static_cast<std::uint32_t>(children.size()); }
  /// Serial execution time of the children.
  Tick sequential_ticks() const;
};

/// Parent that creates a join barrier over n, spawns n children, waits, frees
/// the barrier and exits.
TraceProgram make_parent_trace(std::uint32_t n);
TraceProgram make_child_trace(Tick length);

AppBundle gen_independent(std::uint32_t n, Tick length);

enum class BenchmarkKind { Independent, Interference };
enum class LengthDist { Fixed, Uniform95 };
/// Inter-arrival draw: a Poisson-distributed integer, or an exponential
/// interval (arrivals form a Poisson process).
enum class ArrivalDist { Poisson, Exponential };

struct BenchmarkSpec {
  BenchmarkKind kind = BenchmarkKind::Independent;
  std::uint32_t n = 100;
  Tick max_len = 16000;
  LengthDist len_dist = LengthDist::Fixed;
  double lambda_mean = 7999.0;
  ArrivalDist arrival = ArrivalDist::Poisson;
  double duty = 0.9;
  std::uint64_t seed = 1;

  void validate() const;
};

struct Injection {
  Tick at = 0;
  std::uint32_t gmn = 0;
  AppBundle app;
};

/// Child lengths drawn uniformly from [ceil(0.95 * max_len), max_len].
std::vector<Tick> draw_child_lengths(const BenchmarkSpec& spec, Rng& rng);

/// Two competing applications per period: A at the period start, B one
/// Poisson(lambda_mean) interval later; the next period starts another fresh
/// interval after B. Injection stops at duty * sim_length. Per injection the
/// generator draws the target GMN, then the n child lengths, then the next
/// interval.
std::vector<Injection> gen_interference_schedule(const BenchmarkSpec& spec, Tick sim_length,
                                                 std::uint32_t k, Rng& rng);

}  // namespace tlmsim

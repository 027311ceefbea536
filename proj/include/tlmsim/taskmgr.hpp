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

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "tlmsim/errors.hpp"
#include "tlmsim/protocol.hpp"
#include "tlmsim/traces.hpp"

namespace tlmsim {

using TaskId = std::uint32_t;
using AppId = std::uint32_t;
inline constexpr TaskId kNoTask = 0xFFFFFFFFu;

enum class TaskKind : std::uint8_t { Parent, Helper, Child };
enum class TaskState : std::uint8_t { Ready, Running, BlockedOnJoin, Terminated };

std::string_view to_string(TaskKind k);

/// Task control block. The protocol's tcb address is the task id.
struct TaskControlBlock {
  TaskId id = kNoTask;
  AppId app = 0;
  TaskKind kind = TaskKind::Child;
  FamilyId program = 0;
  std::uint32_t variant = 0;

  // Spawn request carried by a helper.
  std::uint32_t imem = 0;
  std::uint32_t dmem = 0;
  std::uint32_t cnt = 0;

  TaskId spawner = kNoTask;
  std::uint32_t outstanding = 0;  // helper: direct subtasks not yet terminated
  // Helper: cyclic cluster range its subtree is placed in.
  std::uint32_t range_lo = 0;
  std::uint32_t range_len = 0;

  std::uint32_t cluster = 0;                 // GMN the task is mapped to (helpers: hosted by)
  bool mapped = false;                       // assigned to a cluster
  std::optional<std::uint32_t> mapped_to;    // PE (global index); set once
  TaskState state = TaskState::Ready;
  bool started = false;
  Tick spawn_time = 0;
  Tick start_time = 0;
  Tick end_time = 0;

  // Saved execution context.
  std::uint32_t pc = 0;
  std::uint32_t sp = 0;
  std::array<std::uint32_t, kRegisterCount> regs{};
};

/// Chip-wide task-control-block memory. References stay valid while tasks are
/// added.
class TaskTable {
 public:
  TaskControlBlock& create(AppId app, TaskKind kind, FamilyId program, std::uint32_t variant, Tick now);
  TaskControlBlock& at(TaskId id);
  const TaskControlBlock& at(TaskId id) const;
  std::size_t size() const noexcept { return tasks_.size(); }

  auto begin() const { return tasks_.begin(); }
  auto end() const { return tasks_.end(); }

 private:
  std::deque<TaskControlBlock> tasks_;
};

/// Candidate set of a helper placement. Subtree: every task that spawns
/// helpers owns a cyclic range of clusters (the whole chip, starting at its own
/// cluster, for a root task) and hands each helper one half of it; the
/// min-search runs over the helper's half. Chip: every placement searches all
/// clusters, ties going to the lowest index.
enum class HelperScope : std::uint8_t { Subtree, Chip };

/// What a task blocked in join-wait does with its PE. Hold keeps it, Release
/// gives it back at once, Yield keeps it until a parked task needs a PE in
/// the cluster. A task that gave its PE back resumes on that same PE.
enum class JoinWaitPolicy : std::uint8_t { Hold, Release, Yield };

struct MappingParams {
  std::uint32_t m = 256;
  std::uint32_t k = 1;
  Tick c_s = 8;
  std::uint32_t delta_n_th = 4;
  Tick base_cost = 1;
  HelperScope helper_scope = HelperScope::Subtree;
  JoinWaitPolicy join_wait = JoinWaitPolicy::Yield;

  std::uint32_t pes_per_cluster() const noexcept { return m / k; }
};

/// Simulated cost of one min-search over nu candidates: c_s * log2(nu),
/// rounded up, never less than one tick.
Tick selection_delay(std::uint32_t nu, Tick c_s);

/// Recursion stops once the remaining children fit into one cluster or the
/// known number of live helpers reaches the number of clusters.
bool stop_condition(std::uint32_t cnt, std::uint32_t active_helpers, const MappingParams& params);

/// Counters with a tournament tree on top: updates and range minima in
/// O(log n).
class MinIndex {
 public:
  explicit MinIndex(std::size_t n = 0);

  void set(std::size_t idx, std::uint32_t value);
  void add(std::size_t idx, std::int64_t delta);
  std::uint32_t value(std::size_t idx) const { return values_.at(idx); }
  std::uint32_t min_value() const { return values_.at(argmin()); }
  /// Lowest index holding the minimum.
  std::size_t argmin() const;
  /// First index holding the minimum of the cyclic range [lo, lo + len),
  /// scanning from lo.
  std::size_t argmin_in(std::size_t lo, std::size_t len) const;
  const std::vector<std::uint32_t>& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }

 private:
  // Tournament tree over indices; each inner node holds the winner (smaller
  // value, then lower index) of its two children.
  std::size_t better(std::size_t a, std::size_t b) const;
  std::size_t query(std::size_t l, std::size_t r) const;  // [l, r)

  std::vector<std::uint32_t> values_;
  std::size_t leaves_ = 1;
  std::vector<std::uint32_t> tree_;
};

struct MappingDecision {
  enum class Stage : std::uint8_t { Global, Local };
  Stage stage = Stage::Local;
  std::uint32_t gmn = 0;
  std::vector<std::uint32_t> candidates;
  std::optional<std::uint32_t> chosen;  // empty: no PE below capacity
  std::uint32_t range_lo = 0;           // cyclic candidate range
  std::uint32_t range_len = 0;
  Tick at = 0;
};

enum class LifecycleKind : std::uint8_t {
  Created,
  Mapped,      // value: PE index
  Parked,
  PeStart,     // value: PE index
  PeStop,      // value: PE index
  Suspended,
  Terminated,
  BarrierInit,       // task: none, value: address, aux: count
  BarrierDecrement,  // value: address, aux: count after
  BarrierRelease,    // task: resumed waiter, value: address
  BarrierFree,       // value: address
};

struct LifecycleEvent {
  Tick at = 0;
  LifecycleKind kind = LifecycleKind::Created;
  TaskId task = kNoTask;
  std::uint32_t gmn = 0;
  std::uint32_t value = 0;
  std::uint32_t aux = 0;
};

/// Everything a task manager needs from the surrounding chip model.
class ManagerServices {
 public:
  virtual ~ManagerServices() = default;
  virtual TaskTable& tasks() = 0;
  /// Submits msg at tick `at` (>= now). A message addressed to the sending GMN
  /// itself goes straight to its receive queue.
  virtual void send(const Message& msg, Tick at) = 0;
  virtual void task_terminated(const TaskControlBlock& /*tcb*/) {}
  virtual bool wants_events() const { return false; }
  virtual void record(const LifecycleEvent& /*ev*/) {}
  virtual void decision(const MappingDecision& /*d*/) {}
};

struct JoinBarrier {
  struct Waiter {
    TaskId task;
    std::uint32_t pe;  // local PE index
    std::uint32_t task_cluster;
    bool released = false;  // PE given back while waiting
  };
  std::uint32_t addr = 0;
  std::int64_t count = 0;
  std::vector<Waiter> waiters;
};

struct ManagerStats {
  std::uint64_t messages = 0;
  std::uint64_t global_decisions = 0;
  std::uint64_t local_decisions = 0;
  std::uint64_t beacons_tx = 0;
  std::uint64_t beacons_rx = 0;
  std::uint64_t parked = 0;
  std::uint64_t rejected = 0;
  std::uint64_t helpers_started = 0;
};

/// Barrier addresses carry the owning GMN in their upper bits.
inline constexpr unsigned kBarrierSlotBits = 20;
inline std::uint32_t barrier_owner(std::uint32_t addr) { return addr >> kBarrierSlotBits; }

/// Reply value for a rejected system call.
inline constexpr std::uint32_t kReplyError = 0xFFFFFFFEu;

/// Run-time task manager of one global management node.
///
/// handle() processes one delivered message and returns the tick at which the
/// node becomes free again. Every min-search charges selection_delay() to the
/// handler; outgoing messages leave at the handler's running time cursor.
class TaskManager {
 public:
  TaskManager(std::uint32_t gmn, MappingParams params, ManagerServices& services);

  Tick handle(const Message& msg, Tick start);

  // Operations. They act at the current handler cursor.
  void handle_rcsv_spwn(TaskControlBlock& origin, std::uint32_t imem, std::uint32_t dmem,
                        std::uint32_t cnt);
  /// Picks the cluster for a helper among the cyclic range [lo, lo + len).
  std::uint32_t map_global(std::uint32_t lo, std::uint32_t len);
  std::uint32_t map_global() { return map_global(0, params_.k); }
  /// Places the task on the least-loaded free PE of this cluster or parks it.
  /// Returns the local PE index if placed.
  std::optional<std::uint32_t> map_local(TaskControlBlock& tcb);
  void update_workload_on_exit(std::uint32_t pe);
  void maybe_broadcast_status();
  std::uint32_t handle_join_init(std::uint32_t cnt);
  void handle_join_exit(std::uint32_t addr);
  void handle_join_wait(std::uint32_t addr, TaskControlBlock& tcb, std::uint32_t pe);
  void handle_join_free(std::uint32_t addr);
  void handle_rcsv_exit(TaskControlBlock& tcb, std::uint32_t pe);
  void apply_beacon(std::uint32_t from, std::uint32_t word);

  // State.
  std::uint32_t index() const noexcept { return gmn_; }
  const MappingParams& params() const noexcept { return params_; }
  std::uint32_t own_total() const noexcept { return own_total_; }
  std::uint32_t own_helpers() const noexcept { return own_helpers_; }
  std::uint32_t last_broadcast_total() const noexcept { return last_broadcast_; }
  std::uint32_t active_helpers_view() const noexcept;
  const MinIndex& local_counts() const noexcept { return local_; }
  const MinIndex& remote_totals() const noexcept { return remote_; }
  TaskId running_on(std::uint32_t pe) const { return running_.at(pe); }
  std::size_t pending() const noexcept { return pending_.size(); }
  const JoinBarrier* barrier(std::uint32_t addr) const;
  std::size_t live_barriers() const noexcept;
  const ManagerStats& stats() const noexcept { return stats_; }
  Tick cursor() const noexcept { return cursor_; }
  void set_cursor(Tick t) noexcept { cursor_ = t; }

 private:
  NodeAddress self() const { return NodeAddress::gmn(gmn_); }
  NodeAddress lc_of(std::uint32_t pe) const { return NodeAddress::lc(gmn_ * ppc_ + pe); }
  std::uint32_t local_pe(NodeAddress lc) const;
  TaskControlBlock& task_on(std::uint32_t pe);

  void send(MessageType type, NodeAddress dst, std::span<const std::uint32_t> data);
  void reply(std::uint32_t pe, std::uint32_t value);
  void place(TaskControlBlock& tcb, std::uint32_t pe);
  void release_pe(std::uint32_t pe);
  void evict_holder();
  void refill(std::uint32_t pe);
  void terminate(TaskControlBlock& tcb, std::uint32_t pe);
  void signal_barrier(std::uint32_t addr);
  void helper_start(TaskControlBlock& helper);
  void subtask_done(TaskControlBlock& helper);
  void finish_helper(TaskControlBlock& helper);
  void sync_own_entry();
  void emit(LifecycleKind kind, TaskId task, std::uint32_t value = 0, std::uint32_t aux = 0);
  JoinBarrier& barrier_ref(std::uint32_t addr);

  std::uint32_t gmn_;
  MappingParams params_;
  std::uint32_t ppc_;
  ManagerServices& services_;
  Tick cursor_ = 0;

  MinIndex local_;                // per-PE occupancy
  std::vector<TaskId> running_;   // per-PE task
  std::vector<std::deque<TaskId>> resume_;  // tasks waiting to resume on a PE
  struct Holder {
    TaskId task;
    std::uint32_t pe;
    std::uint32_t addr;
  };
  std::vector<Holder> holders_;  // join waiters still sitting on their PE
  std::deque<TaskId> pending_;    // FCFS queue of tasks without a PE

  MinIndex remote_;               // per-GMN totals, own entry live
  std::vector<std::uint32_t> remote_helpers_;
  std::uint64_t remote_helpers_sum_ = 0;
  std::uint32_t own_total_ = 0;
  std::uint32_t own_helpers_ = 0;
  std::uint32_t self_inflight_ = 0;  // helpers sent to self, not yet started
  std::uint32_t last_broadcast_ = 0;

  std::vector<std::optional<JoinBarrier>> barriers_;
  std::vector<std::uint32_t> free_slots_;

  ManagerStats stats_;
};

}  // namespace tlmsim

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
#include <deque>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "tlmsim/interconnect.hpp"
#include "tlmsim/kernel.hpp"
#include "tlmsim/protocol.hpp"
#include "tlmsim/taskmgr.hpp"
#include "tlmsim/traces.hpp"

namespace tlmsim {

struct ChipConfig {
  Topology topo;
  BusTiming global_bus;
  BusTiming local_bus;
  MappingParams mapping;  // m and k are taken from topo
  bool record_lifecycle = false;
};

enum class PeState : std::uint8_t { Idle, Running, BlockedOnSyscall };

struct PeCounters {
  std::uint64_t tasks_started = 0;
  std::uint64_t tasks_finished = 0;
  std::uint64_t busy_ticks = 0;
  std::uint64_t syscalls = 0;
};

struct GmnCounters {
  std::uint64_t messages = 0;
  std::uint64_t busy_ticks = 0;
};

/// Trace interpreter plus its tightly coupled local controller.
struct ProcessingElement {
  std::uint32_t index = 0;  // global LC/PE index
  PeState state = PeState::Idle;
  TaskId task = kNoTask;
  const TraceProgram* program = nullptr;
  std::uint32_t pc = 0;
  Tick busy_since = 0;
  // Local controller slot: the syscall waiting for its reply.
  std::optional<Syscall> pending_call;
  PeCounters counters;
};

struct GlobalNode {
  std::uint32_t index = 0;
  std::deque<Message> rx;
  bool busy = false;
  std::unique_ptr<TaskManager> manager;
  GmnCounters counters;
};

struct AppRecord {
  AppId id = 0;
  TaskId parent = kNoTask;
  std::uint32_t gmn = 0;
  std::uint32_t n_children = 0;
  Tick sequential_ticks = 0;
  Tick inject_tick = 0;
  std::optional<Tick> complete_tick;
  bool injected = false;

  std::optional<Tick> response_time() const {
    if (!complete_tick) return std::nullopt;
    return *complete_tick - inject_tick;
  }
};

/// The whole chip: k GMNs on a global bus, each with m/k LC/PE pairs on its
/// own local bus.
class Chip final : public ManagerServices {
 public:
  /// Observer of every delivered message: (tick, message, receiver, words).
  using MessageObserver = Bus::Observer;

  Chip(Kernel& kernel, ChipConfig config);
  Chip(const Chip&) = delete;
  Chip& operator=(const Chip&) = delete;

  /// Registers an application. The parent's @child reference resolves to the
  /// family holding the bundle's children.
  AppId load_app(const AppBundle& app);
  /// Injects the parent of `app` at the given GMN as a highest-priority
  /// stimulus arriving at tick `at`.
  void inject(AppId app, std::uint32_t gmn, Tick at);

  void set_message_observer(MessageObserver obs);
  void set_lifecycle_observer(std::function<void(const LifecycleEvent&)> obs) {
    lifecycle_observer_ = std::move(obs);
    record_ = true;
  }
  void set_decision_observer(std::function<void(const MappingDecision&)> obs) {
    decision_observer_ = std::move(obs);
    record_ = true;
  }

  // ManagerServices
  TaskTable& tasks() override { return tasks_; }
  void send(const Message& msg, Tick at) override;
  void task_terminated(const TaskControlBlock& tcb) override;
  bool wants_events() const override { return record_; }
  void record(const LifecycleEvent& ev) override;
  void decision(const MappingDecision& d) override;

  const ChipConfig& config() const noexcept { return config_; }
  const Topology& topology() const noexcept { return config_.topo; }
  const TaskTable& task_table() const noexcept { return tasks_; }
  const TraceLibrary& library() const noexcept { return library_; }
  const std::vector<AppRecord>& apps() const noexcept { return apps_; }
  const ProcessingElement& pe(std::uint32_t i) const { return pes_.at(i); }
  const GlobalNode& gmn(std::uint32_t i) const { return gmns_.at(i); }
  const TaskManager& manager(std::uint32_t i) const { return *gmns_.at(i).manager; }
  TaskManager& manager(std::uint32_t i) { return *gmns_.at(i).manager; }
  const Bus& global_bus() const noexcept { return *global_bus_; }
  const Bus& local_bus(std::uint32_t cluster) const { return *local_buses_.at(cluster); }
  std::size_t apps_completed() const noexcept { return completed_; }
  std::uint64_t beacons_tx() const;
  std::uint64_t beacons_rx() const;
  std::uint64_t messages_delivered() const;
  /// True when no task is alive and no message is in flight.
  bool quiescent() const;

 private:
  void deliver(const Message& msg, NodeAddress to);
  void gmn_enqueue(std::uint32_t g, const Message& msg);
  void gmn_process(std::uint32_t g);
  void lc_receive(std::uint32_t pe, const Message& msg);
  void pe_step(std::uint32_t pe);
  void lc_dispatch(std::uint32_t pe, const SyscallStep& step);
  void pe_release(std::uint32_t pe);
  std::uint32_t eval_arg(const TaskControlBlock& tcb, const TraceArg& arg) const;
  Bus& route(const Message& msg);

  Kernel& kernel_;
  ChipConfig config_;
  bool record_;
  TaskTable tasks_;
  TraceLibrary library_;
  std::vector<GlobalNode> gmns_;
  std::vector<ProcessingElement> pes_;
  std::unique_ptr<Bus> global_bus_;
  std::vector<std::unique_ptr<Bus>> local_buses_;
  std::vector<AppRecord> apps_;
  std::size_t completed_ = 0;
  std::uint64_t in_flight_ = 0;  // submitted, not yet delivered
  std::function<void(const LifecycleEvent&)> lifecycle_observer_;
  std::function<void(const MappingDecision&)> decision_observer_;
};

}  // namespace tlmsim

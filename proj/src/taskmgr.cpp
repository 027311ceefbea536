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


#include "tlmsim/taskmgr.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

namespace tlmsim {

std::string_view to_string(TaskKind k) {
  switch (k) {
    case TaskKind::Parent: return "parent";
    case TaskKind::Helper: return "helper";
    case TaskKind::Child: return "child";
  }
  return "?";
}

TaskControlBlock& TaskTable::create(AppId app, TaskKind kind, FamilyId program, std::uint32_t variant,
                                    Tick now) {
  TaskControlBlock tcb;
  tcb.id = static_cast<TaskId>(tasks_.size());
  tcb.app = app;
  tcb.kind = kind;
  tcb.program = program;
  tcb.variant = variant;
  tcb.spawn_time = now;
  tcb.sp = 0x10000000u + tcb.id * 0x400u;
  tasks_.push_back(tcb);
  return tasks_.back();
}

TaskControlBlock& TaskTable::at(TaskId id) {
  if (id >= tasks_.size()) throw ProtocolError("unknown task-control-block " + std::to_string(id));
  return tasks_[id];
}

const TaskControlBlock& TaskTable::at(TaskId id) const {
  if (id >= tasks_.size()) throw ProtocolError("unknown task-control-block " + std::to_string(id));
  return tasks_[id];
}

Tick selection_delay(std::uint32_t nu, Tick c_s) {
  if (nu == 0) throw InvariantError("selection over zero candidates");
  Tick cost;
  if (std::has_single_bit(nu)) {
    cost = c_s * static_cast<Tick>(std::bit_width(nu) - 1);
  } else {
    cost = static_cast<Tick>(std::ceil(static_cast<double>(c_s) * std::log2(static_cast<double>(nu))));
  }
  return std::max<Tick>(1, cost);
}

bool stop_condition(std::uint32_t cnt, std::uint32_t active_helpers, const MappingParams& params) {
  return cnt <= params.pes_per_cluster() || active_helpers >= params.k;
}

MinIndex::MinIndex(std::size_t n) : values_(n, 0) {
  leaves_ = std::bit_ceil(std::max<std::size_t>(n, 1));
  tree_.assign(2 * leaves_, static_cast<std::uint32_t>(n));
  for (std::size_t i = 0; i < n; ++i) tree_[leaves_ + i] = static_cast<std::uint32_t>(i);
  for (std::size_t i = leaves_ - 1; i > 0; --i) tree_[i] = static_cast<std::uint32_t>(better(tree_[2 * i], tree_[2 * i + 1]));
}

// Index n marks an empty leaf and never wins.
std::size_t MinIndex::better(std::size_t a, std::size_t b) const {
  const std::size_t n = values_.size();
  if (a >= n) return b;
  if (b >= n) return a;
  if (values_[a] != values_[b]) return values_[a] < values_[b] ? a : b;
  return std::min(a, b);
}

std::size_t MinIndex::query(std::size_t l, std::size_t r) const {
  std::size_t left = values_.size();
  std::size_t right = values_.size();
  for (l += leaves_, r += leaves_; l < r; l >>= 1, r >>= 1) {
    if (l & 1) left = better(left, tree_[l++]);
    if (r & 1) right = better(tree_[--r], right);
  }
  return better(left, right);
}

void MinIndex::set(std::size_t idx, std::uint32_t value) {
  auto& v = values_.at(idx);
  if (v == value) return;
  v = value;
  for (std::size_t i = (leaves_ + idx) >> 1; i > 0; i >>= 1) {
    tree_[i] = static_cast<std::uint32_t>(better(tree_[2 * i], tree_[2 * i + 1]));
  }
}

void MinIndex::add(std::size_t idx, std::int64_t delta) {
  const std::int64_t next = static_cast<std::int64_t>(values_.at(idx)) + delta;
  if (next < 0) throw InvariantError("workload counter underflow at index " + std::to_string(idx));
  set(idx, static_cast<std::uint32_t>(next));
}

std::size_t MinIndex::argmin() const {
  if (values_.empty()) throw InvariantError("min-search over an empty table");
  return tree_[1];
}

std::size_t MinIndex::argmin_in(std::size_t lo, std::size_t len) const {
  const std::size_t n = values_.size();
  if (n == 0 || len == 0 || len > n || lo >= n) throw InvariantError("min-search over an invalid range");
  if (lo + len <= n) return query(lo, lo + len);
  // Wrapped range: the part from lo wins ties.
  const std::size_t head = query(lo, n);
  const std::size_t tail = query(0, lo + len - n);
  return values_[tail] < values_[head] ? tail : head;
}

TaskManager::TaskManager(std::uint32_t gmn, MappingParams params, ManagerServices& services)
    : gmn_(gmn),
      params_(params),
      ppc_(params.pes_per_cluster()),
      services_(services),
      local_(params.pes_per_cluster()),
      running_(params.pes_per_cluster(), kNoTask),
      resume_(params.pes_per_cluster()),
      remote_(params.k),
      remote_helpers_(params.k, 0) {
  Topology{params.m, params.k}.validate();
  if (params.k > (1u << (32 - kBarrierSlotBits))) throw ConfigError("too many clusters for barrier addressing");
  if (params.delta_n_th == 0) throw ConfigError("delta_n_th must be >= 1");
  if (gmn >= params.k) throw ConfigError("GMN index out of range");
}

std::uint32_t TaskManager::active_helpers_view() const noexcept {
  return static_cast<std::uint32_t>(own_helpers_ + self_inflight_ + remote_helpers_sum_);
}

const JoinBarrier* TaskManager::barrier(std::uint32_t addr) const {
  if (barrier_owner(addr) != gmn_) return nullptr;
  const std::uint32_t slot = (addr & ((1u << kBarrierSlotBits) - 1)) - 1;
  if (slot >= barriers_.size() || !barriers_[slot]) return nullptr;
  return &*barriers_[slot];
}

std::size_t TaskManager::live_barriers() const noexcept {
  return static_cast<std::size_t>(std::count_if(barriers_.begin(), barriers_.end(),
                                                [](const auto& b) { return b.has_value(); }));
}

JoinBarrier& TaskManager::barrier_ref(std::uint32_t addr) {
  const JoinBarrier* b = barrier(addr);
  if (!b) throw ProtocolError("gmn" + std::to_string(gmn_) + ": unknown join barrier " + std::to_string(addr));
  return const_cast<JoinBarrier&>(*b);
}

std::uint32_t TaskManager::local_pe(NodeAddress lc) const {
  if (!lc.is_lc() || lc.index / ppc_ != gmn_) {
    throw RoutingError(to_string(lc) + " is not a member of cluster " + std::to_string(gmn_));
  }
  return lc.index % ppc_;
}

TaskControlBlock& TaskManager::task_on(std::uint32_t pe) {
  const TaskId id = running_.at(pe);
  if (id == kNoTask) {
    throw ProtocolError("gmn" + std::to_string(gmn_) + ": system call from idle PE " + std::to_string(pe));
  }
  return services_.tasks().at(id);
}

void TaskManager::emit(LifecycleKind kind, TaskId task, std::uint32_t value, std::uint32_t aux) {
  if (services_.wants_events()) services_.record(LifecycleEvent{cursor_, kind, task, gmn_, value, aux});
}

void TaskManager::send(MessageType type, NodeAddress dst, std::span<const std::uint32_t> data) {
  services_.send(make_message(type, self(), dst, 0, false, data), cursor_);
}

void TaskManager::reply(std::uint32_t pe, std::uint32_t value) {
  const std::array<std::uint32_t, 1> d{value};
  send(MessageType::SyscallReply, lc_of(pe), d);
}

void TaskManager::sync_own_entry() { remote_.set(gmn_, own_total_ + self_inflight_); }

Tick TaskManager::handle(const Message& msg, Tick start) {
  cursor_ = start + params_.base_cost;
  ++stats_.messages;
  const bool from_lc = msg.src.is_lc();
  switch (msg.type) {
    case MessageType::RcsvSpwn: {
      if (!from_lc) throw ProtocolError("rcsv-spwn must come from a local controller");
      const std::uint32_t pe = local_pe(msg.src);
      auto& origin = task_on(pe);
      if (msg.word(2) == 0) {
        ++stats_.rejected;
        reply(pe, kReplyError);
        break;
      }
      handle_rcsv_spwn(origin, msg.word(0), msg.word(1), msg.word(2));
      reply(pe, 0);
      break;
    }
    case MessageType::RcsvExit: {
      if (from_lc) {
        const std::uint32_t pe = local_pe(msg.src);
        handle_rcsv_exit(task_on(pe), pe);
      } else {
        // A remote helper finished; its spawner lives here.
        auto& done = services_.tasks().at(msg.word(0));
        auto& spawner = services_.tasks().at(done.spawner);
        if (spawner.kind != TaskKind::Helper || spawner.cluster != gmn_) {
          throw ProtocolError("rcsv-exit notification for a helper not hosted by gmn" + std::to_string(gmn_));
        }
        subtask_done(spawner);
      }
      break;
    }
    case MessageType::JoinInit: {
      if (!from_lc) throw ProtocolError("join-init must come from a local controller");
      const std::uint32_t pe = local_pe(msg.src);
      task_on(pe);
      reply(pe, handle_join_init(msg.word(0)));
      break;
    }
    case MessageType::JoinFree: {
      if (!from_lc) throw ProtocolError("join-free must come from a local controller");
      const std::uint32_t pe = local_pe(msg.src);
      task_on(pe);
      handle_join_free(msg.word(0));
      reply(pe, 0);
      break;
    }
    case MessageType::JoinWait: {
      if (!from_lc) throw ProtocolError("join-wait must come from a local controller");
      const std::uint32_t pe = local_pe(msg.src);
      handle_join_wait(msg.word(0), task_on(pe), pe);
      break;
    }
    case MessageType::JoinExit: {
      if (from_lc) {
        const std::uint32_t pe = local_pe(msg.src);
        terminate(task_on(pe), pe);
        signal_barrier(msg.word(0));
      } else {
        handle_join_exit(msg.word(0));
      }
      break;
    }
    case MessageType::TaskStart: {
      if (from_lc) throw ProtocolError("task-start cannot originate at a local controller");
      auto& tcb = services_.tasks().at(msg.word(0));
      if (tcb.kind == TaskKind::Helper) {
        helper_start(tcb);
      } else if (!tcb.mapped) {
        map_local(tcb);
      } else {
        throw ProtocolError("task-start for already mapped task " + std::to_string(tcb.id));
      }
      break;
    }
    case MessageType::StatusBeacon:
      if (from_lc) throw ProtocolError("status-beacon from a local controller");
      ++stats_.beacons_rx;
      apply_beacon(msg.src.index, msg.word(0));
      break;
    case MessageType::SyscallReply:
      throw ProtocolError("syscall-reply delivered to gmn" + std::to_string(gmn_));
  }
  return cursor_;
}

void TaskManager::handle_rcsv_spwn(TaskControlBlock& origin, std::uint32_t imem, std::uint32_t dmem,
                                   std::uint32_t cnt) {
  if (cnt == 0) throw ProtocolError("rcsv-spwn with cnt=0");
  auto& tasks = services_.tasks();
  const TaskId origin_id = origin.id;
  const AppId app = origin.app;
  const std::uint32_t first = origin.kind == TaskKind::Helper ? origin.variant : 0;

  // Cluster range handed down the fork tree.
  std::uint32_t lo = 0;
  std::uint32_t len = params_.k;
  if (params_.helper_scope == HelperScope::Subtree) {
    if (origin.kind == TaskKind::Helper) {
      lo = origin.range_lo;
      len = origin.range_len;
    } else {
      lo = gmn_;
    }
  }

  // In subtree scope a helper left with a single cluster has every cluster
  // of its range covered, the local analogue of the chip-wide helper count.
  const bool stop = params_.helper_scope == HelperScope::Subtree
                        ? cnt <= ppc_ || len <= 1
                        : stop_condition(cnt, active_helpers_view(), params_);
  if (stop) {
    for (std::uint32_t i = 0; i < cnt; ++i) {
      auto& child = tasks.create(app, TaskKind::Child, imem, first + i, cursor_);
      child.regs[0] = dmem;
      child.spawner = origin_id;
      ++tasks.at(origin_id).outstanding;
      emit(LifecycleKind::Created, child.id);
      map_local(child);
    }
    return;
  }

  const std::uint32_t first_len = len > 1 ? (len + 1) / 2 : len;
  const std::uint32_t ranges[2][2] = {{lo, first_len},
                                      {len > 1 ? (lo + first_len) % params_.k : lo, len > 1 ? len - first_len : len}};

  const std::uint32_t halves[2] = {(cnt + 1) / 2, cnt / 2};
  std::uint32_t offset = first;
  for (int i = 0; i < 2; ++i) {
    auto& helper = tasks.create(app, TaskKind::Helper, imem, offset, cursor_);
    helper.imem = imem;
    helper.dmem = dmem;
    helper.cnt = halves[i];
    helper.spawner = origin_id;
    helper.range_lo = ranges[i][0];
    helper.range_len = ranges[i][1];
    ++tasks.at(origin_id).outstanding;
    offset += halves[i];
    emit(LifecycleKind::Created, helper.id);

    const std::uint32_t target = params_.helper_scope == HelperScope::Subtree
                                     ? map_global(helper.range_lo, helper.range_len)
                                     : map_global();
    helper.cluster = target;
    helper.mapped = true;
    if (target == gmn_) {
      ++self_inflight_;
      sync_own_entry();
    } else {
      remote_.add(target, 1);
      ++remote_helpers_[target];
      ++remote_helpers_sum_;
    }
    const std::array<std::uint32_t, 2> d{helper.id, helper.sp};
    send(MessageType::TaskStart, NodeAddress::gmn(target), d);
  }
}

std::uint32_t TaskManager::map_global(std::uint32_t lo, std::uint32_t len) {
  // The selection is charged over the whole table of k entries.
  cursor_ += selection_delay(params_.k, params_.c_s);
  ++stats_.global_decisions;
  const auto chosen = static_cast<std::uint32_t>(len == params_.k && lo == 0 ? remote_.argmin()
                                                                             : remote_.argmin_in(lo, len));
  if (services_.wants_events()) {
    services_.decision(
        MappingDecision{MappingDecision::Stage::Global, gmn_, remote_.values(), chosen, lo, len, cursor_});
  }
  return chosen;
}

std::optional<std::uint32_t> TaskManager::map_local(TaskControlBlock& tcb) {
  if (tcb.mapped) throw InvariantError("task " + std::to_string(tcb.id) + " mapped twice");
  cursor_ += selection_delay(ppc_, params_.c_s);
  ++stats_.local_decisions;
  tcb.mapped = true;
  tcb.cluster = gmn_;
  ++own_total_;
  sync_own_entry();

  std::optional<std::uint32_t> chosen;
  // A PE takes one task at a time; the GMN is the only queueing point.
  if (local_.min_value() == 0) chosen = static_cast<std::uint32_t>(local_.argmin());
  if (services_.wants_events()) {
    services_.decision(
        MappingDecision{MappingDecision::Stage::Local, gmn_, local_.values(), chosen, 0, ppc_, cursor_});
  }
  if (chosen) {
    place(tcb, *chosen);
  } else {
    pending_.push_back(tcb.id);
    ++stats_.parked;
    emit(LifecycleKind::Parked, tcb.id);
    if (params_.join_wait == JoinWaitPolicy::Yield && !holders_.empty()) evict_holder();
  }
  maybe_broadcast_status();
  return chosen;
}

void TaskManager::place(TaskControlBlock& tcb, std::uint32_t pe) {
  if (running_.at(pe) != kNoTask) throw InvariantError("PE " + std::to_string(pe) + " already assigned");
  local_.add(pe, 1);
  running_[pe] = tcb.id;
  const std::uint32_t global_pe = gmn_ * ppc_ + pe;
  if (tcb.mapped_to && *tcb.mapped_to != global_pe) {
    throw InvariantError("task " + std::to_string(tcb.id) + " would migrate");
  }
  if (!tcb.mapped_to) {
    tcb.mapped_to = global_pe;
    emit(LifecycleKind::Mapped, tcb.id, global_pe);
  }
  const std::array<std::uint32_t, 2> d{tcb.id, tcb.sp};
  send(MessageType::TaskStart, lc_of(pe), d);
}

void TaskManager::release_pe(std::uint32_t pe) {
  local_.add(pe, -1);
  running_.at(pe) = kNoTask;
  refill(pe);
}

void TaskManager::refill(std::uint32_t pe) {
  auto& tasks = services_.tasks();
  if (!resume_.at(pe).empty()) {
    const TaskId id = resume_[pe].front();
    resume_[pe].pop_front();
    place(tasks.at(id), pe);
  } else if (!pending_.empty()) {
    const TaskId id = pending_.front();
    pending_.pop_front();
    place(tasks.at(id), pe);
  }
}

void TaskManager::update_workload_on_exit(std::uint32_t pe) {
  if (own_total_ == 0) throw InvariantError("gmn" + std::to_string(gmn_) + ": mapped-task total underflow");
  --own_total_;
  sync_own_entry();
  release_pe(pe);
  maybe_broadcast_status();
}

void TaskManager::maybe_broadcast_status() {
  if (params_.k <= 1) return;
  const std::uint32_t diff = own_total_ > last_broadcast_ ? own_total_ - last_broadcast_ : last_broadcast_ - own_total_;
  if (diff < params_.delta_n_th) return;
  const std::array<std::uint32_t, 1> d{pack_beacon(own_total_, own_helpers_)};
  services_.send(make_message(MessageType::StatusBeacon, self(), self(), 0, true, d), cursor_);
  last_broadcast_ = own_total_;
  ++stats_.beacons_tx;
}

void TaskManager::apply_beacon(std::uint32_t from, std::uint32_t word) {
  if (from >= params_.k) throw ProtocolError("beacon from unknown gmn" + std::to_string(from));
  if (from == gmn_) return;
  const BeaconValue v = unpack_beacon(word);
  remote_.set(from, v.total);
  remote_helpers_sum_ -= remote_helpers_[from];
  remote_helpers_[from] = v.helpers;
  remote_helpers_sum_ += v.helpers;
}

std::uint32_t TaskManager::handle_join_init(std::uint32_t cnt) {
  std::uint32_t slot;
  if (!free_slots_.empty()) {
    slot = free_slots_.back();
    free_slots_.pop_back();
  } else {
    slot = static_cast<std::uint32_t>(barriers_.size());
    if (slot + 1 >= (1u << kBarrierSlotBits)) throw ProtocolError("join barrier slots exhausted");
    barriers_.emplace_back();
  }
  const std::uint32_t addr = (gmn_ << kBarrierSlotBits) | (slot + 1);
  barriers_[slot] = JoinBarrier{addr, static_cast<std::int64_t>(cnt), {}};
  emit(LifecycleKind::BarrierInit, kNoTask, addr, cnt);
  return addr;
}

void TaskManager::handle_join_exit(std::uint32_t addr) {
  auto& b = barrier_ref(addr);
  if (b.count <= 0) throw ProtocolError("join-exit on satisfied barrier " + std::to_string(addr));
  --b.count;
  emit(LifecycleKind::BarrierDecrement, kNoTask, addr, static_cast<std::uint32_t>(b.count));
  if (b.count > 0) return;
  auto waiters = std::move(b.waiters);
  b.waiters.clear();
  auto& tasks = services_.tasks();
  for (const auto& w : waiters) {
    auto& tcb = tasks.at(w.task);
    emit(LifecycleKind::BarrierRelease, w.task, addr);
    if (w.task_cluster != gmn_) throw InvariantError("join waiter parked at a foreign GMN");
    if (!w.released) {
      std::erase_if(holders_, [&](const Holder& h) { return h.task == w.task; });
      tcb.state = TaskState::Running;
      reply(w.pe, 0);
      continue;
    }
    tcb.state = TaskState::Ready;
    if (running_.at(w.pe) == kNoTask) {
      place(tcb, w.pe);
    } else {
      resume_[w.pe].push_back(w.task);
    }
  }
}

void TaskManager::handle_join_wait(std::uint32_t addr, TaskControlBlock& tcb, std::uint32_t pe) {
  auto& b = barrier_ref(addr);
  if (b.count == 0) {
    reply(pe, 0);
    return;
  }
  const bool give_back = params_.join_wait == JoinWaitPolicy::Release ||
                         (params_.join_wait == JoinWaitPolicy::Yield && !pending_.empty());
  b.waiters.push_back({tcb.id, pe, gmn_, give_back});
  tcb.state = TaskState::BlockedOnJoin;
  emit(LifecycleKind::Suspended, tcb.id, addr);
  if (!give_back) {
    // Reply goes out on release.
    if (params_.join_wait == JoinWaitPolicy::Yield) holders_.push_back({tcb.id, pe, addr});
    return;
  }
  // The task keeps its cluster slot but gives up the PE until released.
  reply(pe, kReplySuspend);
  release_pe(pe);
}

// Newest holder first: older waiters are closer to their release.
void TaskManager::evict_holder() {
  const Holder h = holders_.back();
  holders_.pop_back();
  auto& b = barrier_ref(h.addr);
  auto it = std::find_if(b.waiters.begin(), b.waiters.end(), [&](const auto& w) { return w.task == h.task; });
  if (it == b.waiters.end()) throw InvariantError("holder " + std::to_string(h.task) + " missing from its barrier");
  it->released = true;
  reply(h.pe, kReplySuspend);
  release_pe(h.pe);
}

void TaskManager::handle_join_free(std::uint32_t addr) {
  auto& b = barrier_ref(addr);
  if (!b.waiters.empty()) throw ProtocolError("join-free on barrier with parked waiters");
  if (b.count != 0) throw ProtocolError("join-free on open barrier " + std::to_string(addr));
  const std::uint32_t slot = (addr & ((1u << kBarrierSlotBits) - 1)) - 1;
  barriers_[slot].reset();
  free_slots_.push_back(slot);
  emit(LifecycleKind::BarrierFree, kNoTask, addr);
}

void TaskManager::handle_rcsv_exit(TaskControlBlock& tcb, std::uint32_t pe) { terminate(tcb, pe); }

void TaskManager::terminate(TaskControlBlock& tcb, std::uint32_t pe) {
  if (tcb.state == TaskState::Terminated) throw InvariantError("task " + std::to_string(tcb.id) + " exited twice");
  tcb.state = TaskState::Terminated;
  tcb.end_time = cursor_;
  emit(LifecycleKind::Terminated, tcb.id, pe);
  update_workload_on_exit(pe);
  services_.task_terminated(tcb);
  if (tcb.spawner != kNoTask) {
    auto& spawner = services_.tasks().at(tcb.spawner);
    if (spawner.kind == TaskKind::Helper) subtask_done(spawner);
  }
}

void TaskManager::signal_barrier(std::uint32_t addr) {
  const std::uint32_t owner = barrier_owner(addr);
  if (owner == gmn_) {
    handle_join_exit(addr);
    return;
  }
  if (owner >= params_.k) throw ProtocolError("join-exit on unknown barrier " + std::to_string(addr));
  const std::array<std::uint32_t, 1> d{addr};
  send(MessageType::JoinExit, NodeAddress::gmn(owner), d);
}

void TaskManager::helper_start(TaskControlBlock& helper) {
  if (helper.cluster != gmn_) throw ProtocolError("helper delivered to the wrong gmn");
  if (helper.started) throw ProtocolError("helper " + std::to_string(helper.id) + " started twice");
  if (self_inflight_ > 0 && helper.spawner != kNoTask &&
      services_.tasks().at(helper.spawner).cluster == gmn_) {
    --self_inflight_;
  }
  helper.started = true;
  helper.start_time = cursor_;
  helper.state = TaskState::Running;
  ++stats_.helpers_started;
  ++own_helpers_;
  ++own_total_;
  sync_own_entry();
  maybe_broadcast_status();
  handle_rcsv_spwn(helper, helper.imem, helper.dmem, helper.cnt);
}

void TaskManager::subtask_done(TaskControlBlock& helper) {
  if (helper.outstanding == 0) throw InvariantError("helper " + std::to_string(helper.id) + " has no subtasks left");
  if (--helper.outstanding == 0) finish_helper(helper);
}

void TaskManager::finish_helper(TaskControlBlock& helper) {
  helper.state = TaskState::Terminated;
  helper.end_time = cursor_;
  emit(LifecycleKind::Terminated, helper.id);
  if (own_helpers_ == 0 || own_total_ == 0) throw InvariantError("helper bookkeeping underflow");
  --own_helpers_;
  --own_total_;
  sync_own_entry();
  services_.task_terminated(helper);
  maybe_broadcast_status();
  auto& spawner = services_.tasks().at(helper.spawner);
  if (spawner.kind != TaskKind::Helper) return;
  if (spawner.cluster == gmn_) {
    subtask_done(spawner);
  } else {
    const std::array<std::uint32_t, 1> d{helper.id};
    send(MessageType::RcsvExit, NodeAddress::gmn(spawner.cluster), d);
  }
}

}  // namespace tlmsim

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


#include "tlmsim/nodes.hpp"

#include <string>

namespace tlmsim {

namespace {

MessageType message_for(Syscall s) {
  switch (s) {
    case Syscall::RcsvSpwn: return MessageType::RcsvSpwn;
    case Syscall::RcsvExit: return MessageType::RcsvExit;
    case Syscall::JoinInit: return MessageType::JoinInit;
    case Syscall::JoinFree: return MessageType::JoinFree;
    case Syscall::JoinWait: return MessageType::JoinWait;
    case Syscall::JoinExit: return MessageType::JoinExit;
  }
  throw ProtocolError("unknown syscall");
}

}  // namespace

Chip::Chip(Kernel& kernel, ChipConfig config)
    : kernel_(kernel), config_(config), record_(config.record_lifecycle) {
  config_.topo.validate();
  config_.mapping.m = config_.topo.m;
  config_.mapping.k = config_.topo.k;
  const auto& topo = config_.topo;
  const std::uint32_t ppc = topo.pes_per_cluster();

  gmns_.resize(topo.k);
  for (std::uint32_t g = 0; g < topo.k; ++g) {
    gmns_[g].index = g;
    gmns_[g].manager = std::make_unique<TaskManager>(g, config_.mapping, *this);
  }
  pes_.resize(topo.m);
  for (std::uint32_t p = 0; p < topo.m; ++p) pes_[p].index = p;

  auto deliver = [this](const Message& msg, NodeAddress to) { this->deliver(msg, to); };
  std::vector<NodeAddress> globals;
  for (std::uint32_t g = 0; g < topo.k; ++g) globals.push_back(NodeAddress::gmn(g));
  global_bus_ = std::make_unique<Bus>("global", kernel_, topo, config_.global_bus, globals, deliver);
  for (std::uint32_t g = 0; g < topo.k; ++g) {
    std::vector<NodeAddress> members{NodeAddress::gmn(g)};
    for (std::uint32_t p = 0; p < ppc; ++p) members.push_back(NodeAddress::lc(g * ppc + p));
    local_buses_.push_back(std::make_unique<Bus>("local" + std::to_string(g), kernel_, topo,
                                                 config_.local_bus, members, deliver));
  }
}

AppId Chip::load_app(const AppBundle& app) {
  if (app.children.empty()) throw ConfigError("application without child tasks");
  const FamilyId children = library_.add_family(app.children);
  TraceProgram parent = resolve_labels(app.parent, [&](const std::string& label) -> std::uint32_t {
    if (label != "child") throw TraceError("unknown label @" + label, 0, 0);
    return children;
  });
  validate(parent);
  const FamilyId parent_family = library_.add_family({std::move(parent)});

  AppRecord rec;
  rec.id = static_cast<AppId>(apps_.size());
  rec.n_children = app.n_children();
  rec.sequential_ticks = app.sequential_ticks();
  rec.parent = tasks_.create(rec.id, TaskKind::Parent, parent_family, 0, 0).id;
  apps_.push_back(rec);
  return rec.id;
}

void Chip::inject(AppId app, std::uint32_t gmn, Tick at) {
  auto& rec = apps_.at(app);
  if (rec.injected) throw ConfigError("application " + std::to_string(app) + " injected twice");
  if (gmn >= gmns_.size()) throw ConfigError("injection target gmn" + std::to_string(gmn) + " does not exist");
  rec.injected = true;
  rec.gmn = gmn;
  rec.inject_tick = at;
  const auto& parent = tasks_.at(rec.parent);
  const std::array<std::uint32_t, 2> d{parent.id, parent.sp};
  const Message msg = make_message(MessageType::TaskStart, NodeAddress::gmn(gmn), NodeAddress::gmn(gmn),
                                   kStimulusPrio, false, d);
  ++in_flight_;
  kernel_.schedule(at, [this, gmn, msg, id = parent.id] {
    tasks_.at(id).spawn_time = kernel_.now();
    --in_flight_;
    gmn_enqueue(gmn, msg);
  });
}

void Chip::set_message_observer(MessageObserver obs) {
  global_bus_->set_observer(obs);
  for (auto& b : local_buses_) b->set_observer(obs);
}

Bus& Chip::route(const Message& msg) {
  const std::uint32_t ppc = config_.topo.pes_per_cluster();
  if (msg.src.is_lc()) return *local_buses_.at(msg.src.index / ppc);
  if (msg.broadcast || msg.dst.is_gmn()) return *global_bus_;
  if (msg.dst.index / ppc != msg.src.index) {
    throw RoutingError(to_string(msg.dst) + " is not in the cluster of " + to_string(msg.src));
  }
  return *local_buses_.at(msg.src.index);
}

void Chip::send(const Message& msg, Tick at) {
  if (!config_.topo.contains(msg.src) || (!msg.broadcast && !config_.topo.contains(msg.dst))) {
    throw RoutingError("message between unknown nodes " + to_string(msg.src) + " -> " + to_string(msg.dst));
  }
  if (!msg.broadcast && msg.src == msg.dst) {
    // A GMN addressing itself, e.g. a helper mapped to its own cluster.
    ++in_flight_;
    kernel_.schedule(at, [this, msg] {
      --in_flight_;
      gmn_enqueue(msg.dst.index, msg);
    });
    return;
  }
  Bus& bus = route(msg);
  in_flight_ += msg.broadcast ? bus.member_count() - 1 : 1;
  if (at == kernel_.now()) {
    bus.submit(msg);
  } else {
    kernel_.schedule(at, [&bus, msg] { bus.submit(msg); });
  }
}

void Chip::deliver(const Message& msg, NodeAddress to) {
  --in_flight_;
  if (to.is_gmn()) {
    gmn_enqueue(to.index, msg);
  } else {
    lc_receive(to.index, msg);
  }
}

void Chip::gmn_enqueue(std::uint32_t g, const Message& msg) {
  auto& node = gmns_.at(g);
  node.rx.push_back(msg);
  if (!node.busy) {
    node.busy = true;
    gmn_process(g);
  }
}

void Chip::gmn_process(std::uint32_t g) {
  auto& node = gmns_[g];
  if (node.rx.empty()) {
    node.busy = false;
    return;
  }
  const Message msg = node.rx.front();
  node.rx.pop_front();
  const Tick start = kernel_.now();
  const Tick end = node.manager->handle(msg, start);
  ++node.counters.messages;
  node.counters.busy_ticks += end - start;
  kernel_.schedule(end, [this, g] { gmn_process(g); });
}

std::uint32_t Chip::eval_arg(const TaskControlBlock& tcb, const TraceArg& arg) const {
  if (const auto* v = std::get_if<std::uint32_t>(&arg)) return *v;
  if (const auto* r = std::get_if<RegRef>(&arg)) return tcb.regs.at(r->index);
  throw TraceError("unresolved label @" + std::get<LabelRef>(arg).name + " in task " + std::to_string(tcb.id), 0, 0);
}

void Chip::lc_receive(std::uint32_t p, const Message& msg) {
  auto& pe = pes_.at(p);
  switch (msg.type) {
    case MessageType::TaskStart: {
      if (pe.state != PeState::Idle) {
        throw InvariantError("task-start for task " + std::to_string(msg.word(0)) + " on busy PE " +
                             std::to_string(p) + " (running task " + std::to_string(pe.task) + ")");
      }
      auto& tcb = tasks_.at(msg.word(0));
      tcb.sp = msg.word(1);
      if (!tcb.started) {
        tcb.started = true;
        tcb.start_time = kernel_.now();
        tcb.pc = 0;
        ++pe.counters.tasks_started;
      }
      tcb.state = TaskState::Running;
      pe.state = PeState::Running;
      pe.task = tcb.id;
      pe.program = &library_.program(tcb.program, tcb.variant);
      pe.pc = tcb.pc;
      pe.busy_since = kernel_.now();
      if (record_) record(LifecycleEvent{kernel_.now(), LifecycleKind::PeStart, tcb.id, p / config_.topo.pes_per_cluster(), p, 0});
      pe_step(p);
      break;
    }
    case MessageType::SyscallReply: {
      if (pe.state != PeState::BlockedOnSyscall || !pe.pending_call) {
        throw ProtocolError("syscall-reply to PE " + std::to_string(p) + " without an open system call");
      }
      const std::uint32_t value = msg.word(0);
      auto& tcb = tasks_.at(pe.task);
      const auto& step = std::get<SyscallStep>(pe.program->steps.at(pe.pc));
      pe.pending_call.reset();
      ++pe.pc;
      if (value == kReplySuspend) {
        tcb.pc = pe.pc;
        pe_release(p);
        return;
      }
      if (step.result_reg) tcb.regs.at(*step.result_reg) = value;
      pe.state = PeState::Running;
      pe_step(p);
      break;
    }
    default:
      throw ProtocolError(std::string(to_string(msg.type)) + " delivered to " + to_string(NodeAddress::lc(p)));
  }
}

void Chip::pe_step(std::uint32_t p) {
  auto& pe = pes_[p];
  const auto& steps = pe.program->steps;
  if (pe.pc >= steps.size()) {
    throw TraceError("task " + std::to_string(pe.task) + " ran past its last step " + std::to_string(pe.pc), 0, 0);
  }
  const auto& step = steps[pe.pc];
  if (const auto* c = std::get_if<ComputeStep>(&step)) {
    ++pe.pc;
    kernel_.schedule(kernel_.now() + c->ticks, [this, p] { pe_step(p); });
  } else if (const auto* mstep = std::get_if<MemStep>(&step)) {
    ++pe.pc;
    kernel_.schedule(kernel_.now() + mstep->ticks, [this, p] { pe_step(p); });
  } else {
    lc_dispatch(p, std::get<SyscallStep>(step));
  }
}

void Chip::lc_dispatch(std::uint32_t p, const SyscallStep& step) {
  auto& pe = pes_[p];
  if (pe.pending_call) {
    throw InvariantError("PE " + std::to_string(p) + " issued a system call while one is pending");
  }
  if (step.args.size() != syscall_arity(step.call)) {
    throw TraceError("task " + std::to_string(pe.task) + " step " + std::to_string(pe.pc) + ": wrong arity", 0, 0);
  }
  const auto& tcb = tasks_.at(pe.task);
  std::array<std::uint32_t, kMaxDataWords> data{};
  for (std::size_t i = 0; i < step.args.size(); ++i) data[i] = eval_arg(tcb, step.args[i]);
  ++pe.counters.syscalls;
  const std::uint32_t ppc = config_.topo.pes_per_cluster();
  const Message msg = make_message(message_for(step.call), NodeAddress::lc(p), NodeAddress::gmn(p / ppc), 0,
                                   false, std::span<const std::uint32_t>(data.data(), step.args.size()));
  if (is_terminating(step.call)) {
    // The task is over; the PE is free before the message even leaves.
    ++pe.pc;
    ++pe.counters.tasks_finished;
    pe_release(p);
  } else {
    pe.state = PeState::BlockedOnSyscall;
    pe.pending_call = step.call;
  }
  send(msg, kernel_.now());
}

void Chip::pe_release(std::uint32_t p) {
  auto& pe = pes_[p];
  pe.counters.busy_ticks += kernel_.now() - pe.busy_since;
  if (record_) record(LifecycleEvent{kernel_.now(), LifecycleKind::PeStop, pe.task, p / config_.topo.pes_per_cluster(), p, 0});
  pe.state = PeState::Idle;
  pe.task = kNoTask;
  pe.program = nullptr;
  pe.pc = 0;
}

void Chip::task_terminated(const TaskControlBlock& tcb) {
  if (tcb.kind != TaskKind::Parent) return;
  auto& rec = apps_.at(tcb.app);
  if (rec.complete_tick) throw InvariantError("application " + std::to_string(rec.id) + " completed twice");
  rec.complete_tick = tcb.end_time;
  ++completed_;
}

void Chip::record(const LifecycleEvent& ev) {
  if (lifecycle_observer_) lifecycle_observer_(ev);
}

void Chip::decision(const MappingDecision& d) {
  if (decision_observer_) decision_observer_(d);
}

std::uint64_t Chip::beacons_tx() const {
  std::uint64_t n = 0;
  for (const auto& g : gmns_) n += g.manager->stats().beacons_tx;
  return n;
}

std::uint64_t Chip::beacons_rx() const {
  std::uint64_t n = 0;
  for (const auto& g : gmns_) n += g.manager->stats().beacons_rx;
  return n;
}

std::uint64_t Chip::messages_delivered() const {
  std::uint64_t n = global_bus_->counters().deliveries;
  for (const auto& b : local_buses_) n += b->counters().deliveries;
  return n;
}

bool Chip::quiescent() const {
  if (in_flight_ != 0) return false;
  for (const auto& g : gmns_) {
    if (g.busy || !g.rx.empty()) return false;
  }
  for (const auto& t : tasks_) {
    if (t.mapped && t.state != TaskState::Terminated) return false;
  }
  return true;
}

}  // namespace tlmsim

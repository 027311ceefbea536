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

#include <functional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "tlmsim/kernel.hpp"
#include "tlmsim/protocol.hpp"

namespace tlmsim {

struct BusTiming {
  Tick tx_delay = 4;
  Tick rx_delay = 4;
  unsigned width_bits = 32;
};

struct BusCounters {
  std::uint64_t granted = 0;
  std::uint64_t words = 0;
  std::uint64_t busy_ticks = 0;
  std::uint64_t deliveries = 0;
  std::uint64_t broadcasts = 0;
};

/// Transaction-level shared bus.
///
/// Each member owns a transmit queue ordered by (prio desc, submission order).
/// When the bus is idle the globally highest-priority head wins; equal
/// priorities are served round-robin over members. A granted transfer holds
/// the bus for its occupancy and arrives tx_delay + occupancy + rx_delay after
/// the grant. A broadcast arrives at every member except the sender.
class Bus {
 public:
  using DeliverFn = std::function<void(const Message&, NodeAddress to)>;
  /// Observer of every delivery: (tick, message, receiver, word count).
  using Observer = std::function<void(Tick, const Message&, NodeAddress, std::size_t)>;

  Bus(std::string name, Kernel& kernel, Topology topo, BusTiming timing,
      std::vector<NodeAddress> members, DeliverFn deliver);

  Bus(const Bus&) = delete;
  Bus& operator=(const Bus&) = delete;

  /// Throws RoutingError if src (or a unicast dst) is not attached.
  void submit(const Message& msg);

  bool is_member(NodeAddress a) const { return slot_of_.contains(key(a)); }
  Tick occupancy(const Message& msg) const;
  Tick transfer_latency(const Message& msg) const {
    return timing_.tx_delay + occupancy(msg) + timing_.rx_delay;
  }

  const std::string& name() const noexcept { return name_; }
  const BusCounters& counters() const noexcept { return counters_; }
  const BusTiming& timing() const noexcept { return timing_; }
  std::size_t member_count() const noexcept { return members_.size(); }
  std::size_t queued() const noexcept { return queued_; }
  void set_observer(Observer obs) { observer_ = std::move(obs); }

 private:
  struct Pending {
    std::uint8_t prio;
    std::uint64_t seq;
    Message msg;
  };
  struct LowerPriority {
    bool operator()(const Pending& a, const Pending& b) const noexcept {
      return a.prio != b.prio ? a.prio < b.prio : a.seq > b.seq;
    }
  };

  std::uint64_t key(NodeAddress a) const noexcept {
    return (static_cast<std::uint64_t>(a.kind) << 32) | a.index;
  }
  std::size_t slot(NodeAddress a) const;
  void request_arbitration();
  void arbitrate();

  std::string name_;
  Kernel& kernel_;
  Topology topo_;
  BusTiming timing_;
  std::vector<NodeAddress> members_;
  std::unordered_map<std::uint64_t, std::size_t> slot_of_;
  std::vector<std::vector<Pending>> queues_;  // binary heaps
  std::set<std::size_t> nonempty_;
  std::size_t rr_next_ = 0;
  std::size_t queued_ = 0;
  std::uint64_t next_seq_ = 0;
  Tick busy_until_ = 0;
  bool arbitration_pending_ = false;
  DeliverFn deliver_;
  Observer observer_;
  BusCounters counters_;
};

}  // namespace tlmsim

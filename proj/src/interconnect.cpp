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


#include "tlmsim/interconnect.hpp"

#include <algorithm>

namespace tlmsim {

Bus::Bus(std::string name, Kernel& kernel, Topology topo, BusTiming timing,
         std::vector<NodeAddress> members, DeliverFn deliver)
    : name_(std::move(name)),
      kernel_(kernel),
      topo_(topo),
      timing_(timing),
      members_(std::move(members)),
      queues_(members_.size()),
      deliver_(std::move(deliver)) {
  if (timing_.width_bits == 0) throw ConfigError("bus width must be positive");
  for (std::size_t i = 0; i < members_.size(); ++i) {
    if (!slot_of_.emplace(key(members_[i]), i).second) {
      throw ConfigError("duplicate member " + to_string(members_[i]) + " on bus " + name_);
    }
  }
}

std::size_t Bus::slot(NodeAddress a) const {
  auto it = slot_of_.find(key(a));
  if (it == slot_of_.end()) throw RoutingError(to_string(a) + " is not attached to bus " + name_);
  return it->second;
}

Tick Bus::occupancy(const Message& msg) const {
  const std::uint64_t bits = 32 * message_word_count(msg, topo_.num_nodes());
  return std::max<Tick>(1, (bits + timing_.width_bits - 1) / timing_.width_bits);
}

void Bus::submit(const Message& msg) {
  const std::size_t s = slot(msg.src);
  if (!msg.broadcast) slot(msg.dst);
  auto& q = queues_[s];
  q.push_back(Pending{msg.prio, next_seq_++, msg});
  std::push_heap(q.begin(), q.end(), LowerPriority{});
  nonempty_.insert(s);
  ++queued_;
  request_arbitration();
}

void Bus::request_arbitration() {
  if (arbitration_pending_ || queued_ == 0) return;
  arbitration_pending_ = true;
  kernel_.schedule(std::max(kernel_.now(), busy_until_), [this] { arbitrate(); });
}

void Bus::arbitrate() {
  arbitration_pending_ = false;
  if (queued_ == 0) return;

  // Highest priority wins; the round-robin order starting at rr_next_ breaks ties.
  std::size_t winner = members_.size();
  int best = -1;
  auto consider = [&](std::size_t s) {
    const int p = queues_[s].front().prio;
    if (p > best) {
      best = p;
      winner = s;
    }
  };
  for (auto it = nonempty_.lower_bound(rr_next_); it != nonempty_.end(); ++it) consider(*it);
  for (auto it = nonempty_.begin(); it != nonempty_.end() && *it < rr_next_; ++it) consider(*it);

  auto& q = queues_[winner];
  std::pop_heap(q.begin(), q.end(), LowerPriority{});
  const Message msg = std::move(q.back().msg);
  q.pop_back();
  if (q.empty()) nonempty_.erase(winner);
  --queued_;
  rr_next_ = (winner + 1) % members_.size();

  const Tick now = kernel_.now();
  const Tick occ = occupancy(msg);
  const std::size_t words = message_word_count(msg, topo_.num_nodes());
  busy_until_ = now + occ;
  ++counters_.granted;
  counters_.words += words;
  counters_.busy_ticks += occ;

  const Tick arrive = now + timing_.tx_delay + occ + timing_.rx_delay;
  if (msg.broadcast) {
    ++counters_.broadcasts;
    counters_.deliveries += members_.size() - 1;
    // One event for all receivers, visited in member order.
    kernel_.schedule(arrive, [this, msg, words] {
      for (const NodeAddress& to : members_) {
        if (to == msg.src) continue;
        if (observer_) observer_(kernel_.now(), msg, to, words);
        deliver_(msg, to);
      }
    });
  } else {
    ++counters_.deliveries;
    kernel_.schedule(arrive, [this, msg, words] {
      if (observer_) observer_(kernel_.now(), msg, msg.dst, words);
      deliver_(msg, msg.dst);
    });
  }

  request_arbitration();
}

}  // namespace tlmsim

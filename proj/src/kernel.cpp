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


#include "tlmsim/kernel.hpp"

#include <algorithm>
#include <string>

namespace tlmsim {

Kernel::EventId Kernel::schedule(Tick at, Action action) {
  if (at < now_) {
    throw InvariantError("event scheduled in the past: t=" + std::to_string(at) +
                         " while now=" + std::to_string(now_));
  }
  const EventId id = next_seq_++;
  std::uint32_t slot;
  if (free_slots_.empty()) {
    slot = static_cast<std::uint32_t>(slots_.size());
    slots_.push_back(std::move(action));
  } else {
    slot = free_slots_.back();
    free_slots_.pop_back();
    slots_[slot] = std::move(action);
  }
  heap_.push_back(Entry{at, id, slot});
  std::push_heap(heap_.begin(), heap_.end(), Later{});
  return id;
}

RunStats Kernel::run_until(Tick limit) {
  RunStats stats;
  while (!heap_.empty() && heap_.front().at <= limit) {
    std::pop_heap(heap_.begin(), heap_.end(), Later{});
    const Entry entry = heap_.back();
    heap_.pop_back();
    now_ = entry.at;
    Action action = std::move(slots_[entry.slot]);
    slots_[entry.slot] = nullptr;
    free_slots_.push_back(entry.slot);
    action();
    ++stats.events_processed;
    ++processed_;
  }
  stats.final_time = now_;
  return stats;
}

}  // namespace tlmsim

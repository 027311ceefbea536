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
#include <vector>

#include "tlmsim/errors.hpp"

namespace tlmsim {

struct RunStats {
  std::uint64_t events_processed = 0;
  Tick final_time = 0;
};

/// Tick-based discrete-event core.
///
/// Events are ordered by (fire time, insertion sequence); equal-time events
/// therefore fire in the order they were scheduled. A kernel instance is
/// single-threaded. Separate instances share nothing.
class Kernel {
 public:
  using Action = std::function<void()>;
  using EventId = std::uint64_t;

  /// Throws InvariantError when `at` lies in the past.
  EventId schedule(Tick at, Action action);
  EventId schedule_in(Tick delay, Action action) { return schedule(now_ + delay, std::move(action)); }

  /// Processes every event with fire time <= limit, in order.
  RunStats run_until(Tick limit);

  Tick now() const noexcept { return now_; }
  bool idle() const noexcept { return heap_.empty(); }
  std::size_t pending() const noexcept { return heap_.size(); }
  std::uint64_t events_processed() const noexcept { return processed_; }

 private:
  // The heap holds plain keys; actions sit in a slot pool so sifting never
  // moves a std::function.
  struct Entry {
    Tick at;
    EventId seq;
    std::uint32_t slot;
  };
  struct Later {
    bool operator()(const Entry& a, const Entry& b) const noexcept {
      return a.at != b.at ? a.at > b.at : a.seq > b.seq;
    }
  };

  std::vector<Entry> heap_;
  std::vector<Action> slots_;
  std::vector<std::uint32_t> free_slots_;
  Tick now_ = 0;
  EventId next_seq_ = 0;
  std::uint64_t processed_ = 0;
};

}  // namespace tlmsim

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <queue>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "roqsim/sim_time.hpp"

namespace roqsim {

/// Raised when a caller breaks a documented precondition. Indicates a bug in
/// the caller, never bad user input.
class DefectError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

enum class EventKind : std::uint8_t {
  Frame,
  Timer,
  Interval,
  Traffic,
  Slot,
  Medium,
  Generic,
};

std::string_view to_string(EventKind kind);

struct EventHandle {
  std::uint64_t seq = 0;
  friend bool operator==(EventHandle, EventHandle) = default;
};

/// Discrete-event engine. Events fire in (fire_at, seq) order; seq is the
/// insertion counter, so simultaneous events keep their scheduling order.
class Simulator {
 public:
  using Action = std::function<void()>;

  Simulator() = default;
  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  SimTime now() const { return now_; }

  /// Throws DefectError if `at` lies before the current clock.
  EventHandle schedule(SimTime at, EventKind kind, Action action);
  EventHandle schedule_in(Duration delay, EventKind kind, Action action) {
    return schedule(now_ + delay, kind, std::move(action));
  }

  /// Returns false if the event already fired or was already cancelled.
  bool cancel(EventHandle handle);

  /// Dispatches every event with fire_at <= end, then sets the clock to end.
  std::uint64_t run_until(SimTime end);

  std::size_t pending() const { return live_.size(); }
  std::uint64_t dispatched() const { return dispatched_; }

  /// Enables the tab-separated dispatch trace. Pass nullptr to disable.
  void set_trace(std::ostream* out) { trace_ = out; }
  bool tracing() const { return trace_ != nullptr; }
  /// Appends to the detail column of the event being dispatched.
  void note(std::string_view detail);

 private:
  struct Entry {
    SimTime at;
    std::uint64_t seq;
    EventKind kind;
    Action action;
  };
  struct Later {
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.at != b.at) return a.at > b.at;
      return a.seq > b.seq;
    }
  };

  SimTime now_{};
  std::uint64_t next_seq_ = 0;
  std::uint64_t dispatched_ = 0;
  std::priority_queue<Entry, std::vector<Entry>, Later> queue_;
  std::unordered_set<std::uint64_t> live_;
  std::ostream* trace_ = nullptr;
  std::string detail_;
};

}  // namespace roqsim

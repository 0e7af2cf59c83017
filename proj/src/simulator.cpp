// SPDX-License-Identifier: Apache-2.0
#include "roqsim/simulator.hpp"

#include <cinttypes>
#include <cstdio>

#include "roqsim/random.hpp"

namespace roqsim {

std::string SimTime::to_string() const {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%" PRId64 ".%06" PRId64, us_ / 1000000, us_ % 1000000);
  return buf;
}

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::Frame:
      return "frame";
    case EventKind::Timer:
      return "timer";
    case EventKind::Interval:
      return "interval";
    case EventKind::Traffic:
      return "traffic";
    case EventKind::Slot:
      return "slot";
    case EventKind::Medium:
      return "medium";
    case EventKind::Generic:
      return "generic";
  }
  return "unknown";
}

EventHandle Simulator::schedule(SimTime at, EventKind kind, Action action) {
  if (at < now_) {
    throw DefectError("event scheduled in the past: " + at.to_string() + " < " + now_.to_string());
  }
  const std::uint64_t seq = next_seq_++;
  queue_.push(Entry{at, seq, kind, std::move(action)});
  live_.insert(seq);
  return EventHandle{seq};
}

bool Simulator::cancel(EventHandle handle) {
  // The entry stays in the heap and is skipped when popped.
  return live_.erase(handle.seq) > 0;
}

void Simulator::note(std::string_view detail) {
  if (!trace_) return;
  if (!detail_.empty()) detail_.push_back(' ');
  detail_.append(detail);
}

std::uint64_t Simulator::run_until(SimTime end) {
  if (end < now_) throw DefectError("run_until target precedes the clock");
  std::uint64_t count = 0;
  while (!queue_.empty() && queue_.top().at <= end) {
    // priority_queue::top is const; the entry is popped right after.
    Entry entry = std::move(const_cast<Entry&>(queue_.top()));
    queue_.pop();
    if (live_.erase(entry.seq) == 0) continue;
    now_ = entry.at;
    detail_.clear();
    entry.action();
    ++count;
    ++dispatched_;
    if (trace_) {
      *trace_ << now_.to_string() << '\t' << entry.seq << '\t' << to_string(entry.kind) << '\t' << detail_
              << '\n';
    }
  }
  now_ = end;
  return count;
}

std::uint64_t RandomSource::mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RandomSource RandomSource::fork(std::uint64_t stream) const {
  return RandomSource(mix(seed_ ^ mix(stream + 0x632be59bd9b4e019ULL)));
}

std::int64_t RandomSource::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (lo > hi) throw DefectError("uniform_int: lo > hi");
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(engine_);
}

double RandomSource::uniform_real(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(engine_);
}

}  // namespace roqsim

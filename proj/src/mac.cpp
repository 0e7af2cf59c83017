// SPDX-License-Identifier: Apache-2.0
#include "roqsim/mac.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace roqsim::mac {

Duration PhyParams::frame_time(std::uint64_t bits) const {
  const auto us = static_cast<std::int64_t>(std::ceil(static_cast<double>(bits) * 1e6 / rate_bps - 1e-9));
  return plcp + Duration::micros(us);
}

Duration PhyParams::exchange_time(std::uint32_t payload_bits) const {
  return rts_time() + sifs + cts_time() + sifs + data_time(payload_bits) + sifs + ack_time();
}

void PhyParams::validate() const {
  if (slot.micros() <= 0 || sifs.micros() <= 0 || difs.micros() <= 0 || plcp.micros() < 0) {
    throw std::invalid_argument("PHY timings must be positive");
  }
  if (!(rate_bps > 0)) throw std::invalid_argument("channel rate must be positive");
  if (cw_min < 0 || cw_max < cw_min) throw std::invalid_argument("need 0 <= cw_min <= cw_max");
  if (retry_limit < 0) throw std::invalid_argument("retry limit must be >= 0");
  if (queue_limit == 0) throw std::invalid_argument("queue limit must be >= 1");
}

std::string_view to_string(FrameKind kind) {
  switch (kind) {
    case FrameKind::Rts:
      return "RTS";
    case FrameKind::Cts:
      return "CTS";
    case FrameKind::Data:
      return "DATA";
    case FrameKind::Ack:
      return "ACK";
  }
  return "?";
}

std::string_view to_string(AttemptOutcome outcome) {
  switch (outcome) {
    case AttemptOutcome::Delivered:
      return "delivered";
    case AttemptOutcome::Collided:
      return "collided";
    case AttemptOutcome::Blocked:
      return "blocked";
  }
  return "?";
}

BackoffAction backoff_step(MacState& state, ChannelState channel, Duration slot, IntervalCounters& counters) {
  if (channel == ChannelState::Busy) {
    counters.busy_stop_time += slot;
    return BackoffAction::Freeze;
  }
  if (state.backoff_remaining == 0) return BackoffAction::Transmit;
  --state.backoff_remaining;
  return BackoffAction::Decrement;
}

int next_contention_window(int cw, int cw_max) { return std::min(2 * (cw + 1) - 1, cw_max); }

FailureResult on_collision_or_timeout(MacState& state, const PhyParams& phy, RandomSource& rng,
                                      IntervalCounters& counters) {
  FailureResult result;
  ++state.retry_count;
  ++counters.retransmissions;
  state.cw = next_contention_window(state.cw, phy.cw_max);
  if (state.retry_count > phy.retry_limit && !state.queue.empty()) {
    result.dropped = state.queue.front();
    state.queue.pop_front();
    state.cw = phy.cw_min;
    state.retry_count = 0;
  }
  result.cw = state.cw;
  state.in_backoff = !state.queue.empty();
  state.backoff_remaining = state.in_backoff ? static_cast<int>(rng.uniform_int(0, state.cw)) : 0;
  return result;
}

Wlan::Wlan(Simulator& sim, PhyParams phy) : sim_(sim), phy_(phy) { phy_.validate(); }

void Wlan::add_station(NodeId id, RandomSource rng) {
  if (id == kAccessPoint) throw DefectError("the access point is not a contending station");
  if (index_.contains(id)) throw DefectError("station registered twice");
  index_.emplace(id, stations_.size());
  Station s{id, MacState{}, IntervalCounters{}, std::move(rng), std::nullopt};
  s.mac.cw = phy_.cw_min;
  stations_.push_back(std::move(s));
}

Wlan::Station& Wlan::station(NodeId id) {
  auto it = index_.find(id);
  if (it == index_.end()) throw DefectError("unknown station " + std::to_string(id.value));
  return stations_[it->second];
}

const Wlan::Station& Wlan::station(NodeId id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw DefectError("unknown station " + std::to_string(id.value));
  return stations_[it->second];
}

bool Wlan::enqueue(NodeId id, Packet packet) {
  Station& s = station(id);
  if (s.mac.queue.size() >= phy_.queue_limit) {
    if (hooks_.dropped) hooks_.dropped(id, packet, DropReason::QueueOverflow);
    return false;
  }
  s.mac.queue.push_back(packet);
  if (!s.mac.in_backoff) begin_backoff(s);
  return true;
}

void Wlan::begin_backoff(Station& s) {
  s.mac.in_backoff = true;
  s.mac.backoff_remaining = static_cast<int>(s.rng.uniform_int(0, s.mac.cw));
  if (medium_busy_) {
    s.frozen_since = sim_.now();
  } else {
    ensure_tick();
  }
}

void Wlan::ensure_tick() {
  if (tick_ || medium_busy_) return;
  const SimTime at = std::max(sim_.now(), idle_since_ + phy_.difs);
  tick_ = sim_.schedule(at, EventKind::Slot, [this] { on_slot(); });
}

ChannelState Wlan::sense_channel(NodeId id, SimTime at) const {
  const Station& s = station(id);
  if (at >= air_start_ && at < air_end_) return ChannelState::Busy;
  if (at < s.mac.nav_until) return ChannelState::Busy;
  return ChannelState::Idle;
}

void Wlan::on_slot() {
  tick_.reset();
  std::vector<std::size_t> transmitters;
  bool contending = false;
  for (std::size_t i = 0; i < stations_.size(); ++i) {
    Station& s = stations_[i];
    if (!s.mac.in_backoff) continue;
    contending = true;
    if (backoff_step(s.mac, ChannelState::Idle, phy_.slot, s.counters) == BackoffAction::Transmit) {
      transmitters.push_back(i);
    }
  }
  if (!transmitters.empty()) {
    start_access(transmitters);
  } else if (contending) {
    tick_ = sim_.schedule(sim_.now() + phy_.slot, EventKind::Slot, [this] { on_slot(); });
  }
}

void Wlan::emit(const Frame& frame, bool decoded) {
  if (sim_.tracing()) {
    std::string d = std::string(to_string(frame.kind)) + " src=" + std::to_string(frame.src.value) +
                    " dst=" + std::to_string(frame.dst.value) + " cb=" + frame.cb.to_string();
    if (!decoded) d += " collided";
    sim_.note(d);
  }
  if (decoded && hooks_.tap) hooks_.tap(frame);
}

void Wlan::start_access(const std::vector<std::size_t>& transmitters) {
  const SimTime t = sim_.now();
  medium_busy_ = true;
  attempts_ += transmitters.size();
  for (std::size_t i = 0; i < stations_.size(); ++i) {
    Station& s = stations_[i];
    if (s.mac.in_backoff && std::find(transmitters.begin(), transmitters.end(), i) == transmitters.end()) {
      s.frozen_since = t;
    }
  }

  if (transmitters.size() > 1) {
    ++collisions_;
    const SimTime end = t + phy_.failed_rts_time();
    air_start_ = t;
    air_end_ = t + phy_.rts_time();
    for (Station& s : stations_) s.mac.nav_until = std::max(s.mac.nav_until, end);
    for (std::size_t i : transmitters) {
      Station& s = stations_[i];
      ++s.counters.rts_cts_count;
      const CongestionBits cb = hooks_.stamp ? hooks_.stamp(s.id) : CongestionBits{};
      const Frame rts{FrameKind::Rts, s.id, kAccessPoint, 0, cb, phy_.failed_rts_time() - phy_.rts_time()};
      sim_.schedule(t, EventKind::Frame, [this, rts] { emit(rts, false); });
    }
    sim_.schedule(end, EventKind::Medium, [this, transmitters] { finish_collision(transmitters); });
    return;
  }

  const std::size_t src = transmitters.front();
  Station& s = stations_[src];
  const Packet packet = s.mac.queue.front();
  const CongestionBits cb = hooks_.stamp ? hooks_.stamp(s.id) : CongestionBits{};
  const bool refused = hooks_.refuse_cts && hooks_.refuse_cts(s.id);

  const Duration rts = phy_.rts_time();
  const Duration cts = phy_.cts_time();
  const Duration data = phy_.data_time(packet.bits);
  const Duration ack = phy_.ack_time();
  const SimTime end = refused ? t + phy_.failed_rts_time() : t + phy_.exchange_time(packet.bits);

  ++s.counters.rts_cts_count;
  for (Station& other : stations_) {
    if (other.id != s.id) other.mac.nav_until = std::max(other.mac.nav_until, end);
  }
  air_start_ = t;
  air_end_ = t + rts;
  const Frame rts_frame{FrameKind::Rts, s.id, kAccessPoint, 0, cb, end - (t + rts)};
  sim_.schedule(t, EventKind::Frame, [this, rts_frame] { emit(rts_frame, true); });

  if (refused) {
    sim_.schedule(end, EventKind::Medium, [this, src] { finish_exchange(src, AttemptOutcome::Blocked); });
    return;
  }

  const SimTime cts_at = t + rts + phy_.sifs;
  const SimTime data_at = cts_at + cts + phy_.sifs;
  const SimTime ack_at = data_at + data + phy_.sifs;
  const NodeId id = s.id;
  sim_.schedule(cts_at, EventKind::Frame, [this, id, cts_at, cts, end, src] {
    air_start_ = cts_at;
    air_end_ = cts_at + cts;
    ++stations_[src].counters.rts_cts_count;
    emit(Frame{FrameKind::Cts, kAccessPoint, id, 0, {}, end - (cts_at + cts)}, true);
  });
  sim_.schedule(data_at, EventKind::Frame, [this, id, data_at, data, end, cb, bits = packet.bits] {
    air_start_ = data_at;
    air_end_ = data_at + data;
    emit(Frame{FrameKind::Data, id, kAccessPoint, bits, cb, end - (data_at + data)}, true);
  });
  sim_.schedule(ack_at, EventKind::Frame, [this, id, ack_at, ack] {
    air_start_ = ack_at;
    air_end_ = ack_at + ack;
    emit(Frame{FrameKind::Ack, kAccessPoint, id, 0, {}, Duration{}}, true);
  });
  sim_.schedule(end, EventKind::Medium, [this, src] { finish_exchange(src, AttemptOutcome::Delivered); });
}

void Wlan::release_medium() {
  const SimTime t = sim_.now();
  medium_busy_ = false;
  idle_since_ = t;
  for (Station& s : stations_) {
    if (s.frozen_since) {
      s.counters.busy_stop_time += t - *s.frozen_since;
      s.frozen_since.reset();
    }
  }
}

void Wlan::finish_exchange(std::size_t src, AttemptOutcome outcome) {
  release_medium();
  Station& s = stations_[src];
  if (sim_.tracing()) sim_.note("exchange src=" + std::to_string(s.id.value) + " " + std::string(to_string(outcome)));
  if (outcome == AttemptOutcome::Delivered) {
    const Packet packet = s.mac.queue.front();
    s.mac.queue.pop_front();
    s.mac.cw = phy_.cw_min;
    s.mac.retry_count = 0;
    s.mac.in_backoff = false;
    if (!s.mac.queue.empty()) {
      s.mac.in_backoff = true;
      s.mac.backoff_remaining = static_cast<int>(s.rng.uniform_int(0, s.mac.cw));
    }
    if (hooks_.outcome) hooks_.outcome(s.id, outcome);
    if (hooks_.delivered) hooks_.delivered(s.id, packet);
  } else {
    FailureResult r = on_collision_or_timeout(s.mac, phy_, s.rng, s.counters);
    if (hooks_.outcome) hooks_.outcome(s.id, outcome);
    if (r.dropped && hooks_.dropped) hooks_.dropped(s.id, *r.dropped, DropReason::RetryLimit);
  }
  ensure_tick();
}

void Wlan::finish_collision(const std::vector<std::size_t>& transmitters) {
  release_medium();
  if (sim_.tracing()) sim_.note("collision stations=" + std::to_string(transmitters.size()));
  for (std::size_t i : transmitters) {
    Station& s = stations_[i];
    FailureResult r = on_collision_or_timeout(s.mac, phy_, s.rng, s.counters);
    if (hooks_.outcome) hooks_.outcome(s.id, AttemptOutcome::Collided);
    if (r.dropped && hooks_.dropped) hooks_.dropped(s.id, *r.dropped, DropReason::RetryLimit);
  }
  ensure_tick();
}

IntervalCounters Wlan::interval_rollover(NodeId id) {
  Station& s = station(id);
  if (s.frozen_since) {
    s.counters.busy_stop_time += sim_.now() - *s.frozen_since;
    s.frozen_since = sim_.now();
  }
  return std::exchange(s.counters, IntervalCounters{});
}

const IntervalCounters& Wlan::counters(NodeId id) const { return station(id).counters; }
const MacState& Wlan::state(NodeId id) const { return station(id).mac; }

void Wlan::set_backoff(NodeId id, int slots) {
  Station& s = station(id);
  if (!s.mac.in_backoff) throw DefectError("station is not in backoff");
  if (slots < 0) throw DefectError("negative backoff");
  s.mac.backoff_remaining = slots;
}

void Wlan::set_nav(NodeId id, SimTime until) {
  Station& s = station(id);
  s.mac.nav_until = std::max(s.mac.nav_until, until);
}

}  // namespace roqsim::mac

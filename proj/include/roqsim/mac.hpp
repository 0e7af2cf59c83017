// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "roqsim/mlda.hpp"
#include "roqsim/node.hpp"
#include "roqsim/random.hpp"
#include "roqsim/simulator.hpp"

namespace roqsim::mac {

using mlda::CongestionBits;
using mlda::IntervalCounters;

struct PhyParams {
  Duration slot = Duration::micros(20);
  Duration sifs = Duration::micros(10);
  Duration difs = Duration::micros(50);
  Duration plcp = Duration::micros(192);
  double rate_bps = 2e6;
  int cw_min = 31;
  int cw_max = 1023;
  int retry_limit = 7;
  std::uint32_t rts_bytes = 20;
  std::uint32_t cts_bytes = 14;
  std::uint32_t ack_bytes = 14;
  std::uint32_t header_bytes = 28;
  std::size_t queue_limit = 50;

  /// Preamble plus serialization of `bits` at the channel rate, rounded up.
  Duration frame_time(std::uint64_t bits) const;
  Duration rts_time() const { return frame_time(8ULL * rts_bytes); }
  Duration cts_time() const { return frame_time(8ULL * cts_bytes); }
  Duration ack_time() const { return frame_time(8ULL * ack_bytes); }
  Duration data_time(std::uint32_t payload_bits) const { return frame_time(8ULL * header_bytes + payload_bits); }
  /// RTS..ACK including the three SIFS gaps.
  Duration exchange_time(std::uint32_t payload_bits) const;
  /// Time an RTS holds the medium when no CTS follows (collision or refusal).
  Duration failed_rts_time() const { return rts_time() + sifs + cts_time(); }

  void validate() const;
};

enum class FrameKind : std::uint8_t { Rts, Cts, Data, Ack };
std::string_view to_string(FrameKind kind);

struct Frame {
  FrameKind kind = FrameKind::Rts;
  NodeId src{};
  NodeId dst{};
  std::uint32_t payload_bits = 0;
  CongestionBits cb{};
  Duration duration{};
};

/// A MAC service data unit waiting in a station queue.
struct Packet {
  std::uint32_t flow = 0;
  std::uint64_t seq = 0;
  std::uint32_t bits = 0;
  SimTime created{};
};

struct MacState {
  int cw = 31;
  int backoff_remaining = 0;
  int retry_count = 0;
  bool in_backoff = false;
  SimTime nav_until{};
  std::deque<Packet> queue;
};

enum class ChannelState : std::uint8_t { Idle, Busy };
enum class BackoffAction : std::uint8_t { Decrement, Freeze, Transmit };

/// One slot of the CSMA/CA countdown. A busy slot freezes the counter and is
/// charged to busy_stop_time; an idle slot decrements it; a counter already at
/// zero means the station transmits at this slot boundary.
BackoffAction backoff_step(MacState& state, ChannelState channel, Duration slot, IntervalCounters& counters);

/// Binary exponential growth, capped: min(2 * (cw + 1) - 1, cw_max).
int next_contention_window(int cw, int cw_max);

struct FailureResult {
  int cw = 0;
  std::optional<Packet> dropped;
};

/// Handles an unanswered RTS. Draws a fresh backoff if frames remain queued.
FailureResult on_collision_or_timeout(MacState& state, const PhyParams& phy, RandomSource& rng,
                                      IntervalCounters& counters);

enum class AttemptOutcome : std::uint8_t { Delivered, Collided, Blocked };
std::string_view to_string(AttemptOutcome outcome);

enum class DropReason : std::uint8_t { RetryLimit, QueueOverflow };

/// Single-cell DCF medium: every station hears every other station and the
/// access point, so there are no hidden terminals. All DATA is addressed to
/// the access point and always uses the RTS/CTS handshake.
class Wlan {
 public:
  struct Hooks {
    /// AP-side CTS suppression.
    std::function<bool(NodeId)> refuse_cts;
    /// DATA frame acknowledged by the access point.
    std::function<void(NodeId, const Packet&)> delivered;
    std::function<void(NodeId, const Packet&, DropReason)> dropped;
    /// Every decoded frame, as overheard by the passive server.
    std::function<void(const Frame&)> tap;
    /// Congestion bits the station stamps into its RTS and DATA headers.
    std::function<CongestionBits(NodeId)> stamp;
    std::function<void(NodeId, AttemptOutcome)> outcome;
  };

  Wlan(Simulator& sim, PhyParams phy);
  Wlan(const Wlan&) = delete;
  Wlan& operator=(const Wlan&) = delete;

  void set_hooks(Hooks hooks) { hooks_ = std::move(hooks); }
  const PhyParams& phy() const { return phy_; }

  void add_station(NodeId id, RandomSource rng);
  bool has_station(NodeId id) const { return index_.contains(id); }

  /// Queues a packet for transmission to the access point. Returns false and
  /// reports a QueueOverflow drop when the station queue is full.
  bool enqueue(NodeId id, Packet packet);

  /// Throws DefectError for unknown stations.
  ChannelState sense_channel(NodeId id, SimTime at) const;

  /// Returns the finished interval's counters and zeroes them.
  IntervalCounters interval_rollover(NodeId id);

  const IntervalCounters& counters(NodeId id) const;
  const MacState& state(NodeId id) const;

  /// Overrides the pending backoff draw of a station that is in backoff.
  void set_backoff(NodeId id, int slots);
  void set_nav(NodeId id, SimTime until);

  std::uint64_t attempts() const { return attempts_; }
  std::uint64_t collisions() const { return collisions_; }

 private:
  struct Station {
    NodeId id;
    MacState mac;
    IntervalCounters counters;
    RandomSource rng;
    std::optional<SimTime> frozen_since;
  };

  Station& station(NodeId id);
  const Station& station(NodeId id) const;
  void begin_backoff(Station& s);
  void ensure_tick();
  void on_slot();
  void start_access(const std::vector<std::size_t>& transmitters);
  void finish_exchange(std::size_t src, AttemptOutcome outcome);
  void finish_collision(const std::vector<std::size_t>& transmitters);
  void release_medium();
  void emit(const Frame& frame, bool decoded);

  Simulator& sim_;
  PhyParams phy_;
  Hooks hooks_;
  std::vector<Station> stations_;
  std::unordered_map<NodeId, std::size_t> index_;

  bool medium_busy_ = false;
  SimTime idle_since_{};
  SimTime air_start_{};
  SimTime air_end_{};
  std::optional<EventHandle> tick_;
  std::uint64_t attempts_ = 0;
  std::uint64_t collisions_ = 0;
};

}  // namespace roqsim::mac

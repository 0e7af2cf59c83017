// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "roqsim/node.hpp"
#include "roqsim/sim_time.hpp"

namespace roqsim::mlda {

/// Per-node, per-interval MAC status triple.
struct IntervalCounters {
  std::uint32_t rts_cts_count = 0;
  Duration busy_stop_time{};
  std::uint32_t retransmissions = 0;

  friend bool operator==(const IntervalCounters&, const IntervalCounters&) = default;
};

struct Thresholds {
  double rc_th = 1.0;
  double se_th_s = 1e-3;
  double re_th = 3.0;
  double interval_s = 1.0;

  /// Throws std::invalid_argument unless every field is strictly positive.
  void validate() const;
};

/// The 3-bit congestion code, rendered "c1c2c3" (e.g. "110").
class CongestionBits {
 public:
  constexpr CongestionBits() = default;
  constexpr CongestionBits(bool c1, bool c2, bool c3)
      : bits_(static_cast<std::uint8_t>((c1 ? 4 : 0) | (c2 ? 2 : 0) | (c3 ? 1 : 0))) {}
  static constexpr CongestionBits from_code(std::uint8_t code) {
    return CongestionBits((code & 4) != 0, (code & 2) != 0, (code & 1) != 0);
  }
  /// Parses "000".."111"; std::nullopt for anything else.
  static std::optional<CongestionBits> parse(std::string_view text);

  constexpr bool c1() const { return (bits_ & 4) != 0; }
  constexpr bool c2() const { return (bits_ & 2) != 0; }
  constexpr bool c3() const { return (bits_ & 1) != 0; }
  constexpr std::uint8_t code() const { return bits_; }
  constexpr int popcount() const { return (bits_ & 1) + ((bits_ >> 1) & 1) + ((bits_ >> 2) & 1); }
  constexpr bool none() const { return bits_ == 0; }

  constexpr CongestionBits operator|(CongestionBits o) const { return from_code(bits_ | o.bits_); }
  constexpr bool operator==(const CongestionBits&) const = default;

  std::string to_string() const;

 private:
  std::uint8_t bits_ = 0;
};

CongestionBits compute_cb(const IntervalCounters& counters, const Thresholds& th);

enum class Finding : std::uint8_t { NoFinding, Normal, Suspected, Attacker };
std::string_view to_string(Finding f);

/// Popcount 0/1/2/3 maps to NoFinding/Normal/Suspected/Attacker.
Finding classify_cb(CongestionBits cb);

enum class Status : std::uint8_t { Normal, Suspected, Attacker, Blocked };
std::string_view to_string(Status s);

enum class Escalation : std::uint8_t {
  /// Block after 3 consecutive Attacker or 4 consecutive Suspected findings.
  Streak,
  /// Block only when the 3rd interval ends with status Attacker or the 4th
  /// ends with status Suspected.
  Absolute,
};

struct NodeStatus {
  Status status = Status::Normal;
  std::uint32_t attacker_streak = 0;
  std::uint32_t suspected_streak = 0;
};

struct MonitorState {
  std::map<NodeId, NodeStatus> nodes;
  std::set<NodeId> blocklist;
  /// Number of intervals processed so far; the next interval is index + 1.
  std::uint32_t interval_index = 0;
};

struct Action {
  enum class Kind : std::uint8_t { TransmitCb, Block };
  Kind kind;
  NodeId node;
  CongestionBits cb;

  friend bool operator==(const Action&, const Action&) = default;
};

/// One row of the detection log.
struct DetectionRecord {
  std::uint32_t interval;
  NodeId node;
  CongestionBits cb;
  Status status;
  bool blocked_now;
};

struct IntervalOutcome {
  std::vector<Action> actions;
  std::vector<DetectionRecord> records;
};

/// Runs one interval of the passive server's classification over per-node
/// congestion codes. Observations for blocklisted nodes are ignored.
IntervalOutcome monitor_interval(MonitorState& state, const std::map<NodeId, CongestionBits>& findings,
                                 Escalation mode);

/// Convenience overload: codes are computed from raw counters first.
IntervalOutcome monitor_interval(MonitorState& state, const std::map<NodeId, IntervalCounters>& observations,
                                 const Thresholds& th, Escalation mode);

bool is_blocked(const MonitorState& state, NodeId node);

/// "interval,node,cb,status,action"
std::string detection_log_header();
std::string to_csv_row(const DetectionRecord& r);

}  // namespace roqsim::mlda

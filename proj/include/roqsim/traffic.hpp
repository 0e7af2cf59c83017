// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>

#include "roqsim/node.hpp"
#include "roqsim/sim_time.hpp"

namespace roqsim::traffic {

inline constexpr double kMinRto = 1.0;
inline constexpr double kMaxRto = 64.0;

enum class TcpState : std::uint8_t { SlowStart, CongestionAvoidance, TimeoutBackoff };

/// Window and timer state of a simplified one-way TCP sender (no fast
/// retransmit, no SACK, no delayed ACK).
struct LegitFlow {
  NodeId src{};
  NodeId dst{};
  double cwnd = 1.0;
  double ssthresh = 64.0;
  std::optional<double> srtt;
  double rttvar = 0.0;
  double rto = kMinRto;
  std::uint32_t packet_bits = 8000;
  TcpState state = TcpState::SlowStart;
};

/// Folds in an ACK. `rtt_sample` is empty when the acknowledged packet was
/// retransmitted; the timer is still re-derived from the estimator.
void legit_on_ack(LegitFlow& flow, std::optional<double> rtt_sample);

/// RTO expiry: multiplicative decrease to one packet and timer backoff.
void legit_on_timeout(LegitFlow& flow);

/// On-off attacker. Bursts start at offset + k * period (+ per-period jitter)
/// and last burst_len. A period of 0 disables the flow.
struct AttackerFlow {
  NodeId src{};
  NodeId dst{};
  double period_s = 0.0;
  double burst_len_s = 0.0;
  double burst_rate_pps = 1.0;
  std::uint32_t packet_bits = 8000;
  double offset_s = 0.0;
  double jitter_s = 0.0;
  std::uint64_t jitter_seed = 0;

  bool enabled() const { return period_s > 0; }
  /// Throws std::invalid_argument when the parameters are inconsistent.
  void validate() const;
};

/// Start time of the k-th burst, including its jitter.
double burst_start(const AttackerFlow& flow, std::int64_t k);

bool is_bursting(const AttackerFlow& flow, double t);

/// Earliest time >= t at which the flow is bursting, or nullopt if disabled.
std::optional<double> next_burst_time(const AttackerFlow& flow, double t);

}  // namespace roqsim::traffic

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "roqsim/node.hpp"

namespace roqsim {

enum class FlowClass : std::uint8_t { Legit, Attack };

struct FlowCounters {
  std::uint64_t packets_sent = 0;
  std::uint64_t packets_delivered = 0;
  std::uint64_t packets_dropped = 0;
  std::uint64_t bits_sent = 0;
  std::uint64_t bits_delivered = 0;
  std::uint64_t bits_dropped = 0;

  FlowCounters& operator+=(const FlowCounters& o);
};

/// Where a dropped packet died.
struct DropBreakdown {
  std::uint64_t mac_retry = 0;
  std::uint64_t mac_queue = 0;
  std::uint64_t ap_buffer = 0;
  std::uint64_t filtered = 0;
};

struct FlowRecord {
  NodeId node{};
  FlowClass cls = FlowClass::Legit;
  /// Whole run, used for the conservation audit.
  FlowCounters total;
  /// Events at or after the warm-up boundary, used for reported metrics.
  FlowCounters measured;
  DropBreakdown drops;
  /// Packets still queued or on a link when the run ended.
  std::uint64_t packets_in_flight = 0;
  std::uint64_t bits_in_flight = 0;
};

struct FlowStats {
  std::vector<FlowRecord> flows;

  FlowCounters total(FlowClass cls) const;
  FlowCounters measured(FlowClass cls) const;
  /// sent == delivered + dropped + in-flight for every flow, bits and packets.
  bool conserved() const;
};

/// Delivered bits per second.
double received_bandwidth(const FlowCounters& counters, double duration_s);

struct PacketLoss {
  std::uint64_t packets = 0;
  /// dropped / sent, 0 when nothing was sent.
  double ratio = 0;
};
PacketLoss packet_loss(const FlowCounters& counters);

}  // namespace roqsim

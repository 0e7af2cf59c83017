// SPDX-License-Identifier: Apache-2.0
#include "roqsim/metrics.hpp"

namespace roqsim {

FlowCounters& FlowCounters::operator+=(const FlowCounters& o) {
  packets_sent += o.packets_sent;
  packets_delivered += o.packets_delivered;
  packets_dropped += o.packets_dropped;
  bits_sent += o.bits_sent;
  bits_delivered += o.bits_delivered;
  bits_dropped += o.bits_dropped;
  return *this;
}

FlowCounters FlowStats::total(FlowClass cls) const {
  FlowCounters sum;
  for (const auto& f : flows) {
    if (f.cls == cls) sum += f.total;
  }
  return sum;
}

FlowCounters FlowStats::measured(FlowClass cls) const {
  FlowCounters sum;
  for (const auto& f : flows) {
    if (f.cls == cls) sum += f.measured;
  }
  return sum;
}

bool FlowStats::conserved() const {
  for (const auto& f : flows) {
    const auto& t = f.total;
    if (t.packets_sent != t.packets_delivered + t.packets_dropped + f.packets_in_flight) return false;
    if (t.bits_sent != t.bits_delivered + t.bits_dropped + f.bits_in_flight) return false;
  }
  return true;
}

double received_bandwidth(const FlowCounters& counters, double duration_s) {
  return static_cast<double>(counters.bits_delivered) / duration_s;
}

PacketLoss packet_loss(const FlowCounters& counters) {
  PacketLoss loss;
  loss.packets = counters.packets_dropped;
  if (counters.packets_sent > 0) {
    loss.ratio = static_cast<double>(counters.packets_dropped) / static_cast<double>(counters.packets_sent);
  }
  return loss;
}

}  // namespace roqsim

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <vector>

#include "roqsim/config.hpp"
#include "roqsim/metrics.hpp"
#include "roqsim/mlda.hpp"
#include "roqsim/shrew.hpp"

namespace roqsim {

struct RunOptions {
  /// Dispatch trace sink; nullptr disables tracing.
  std::ostream* trace = nullptr;
  /// Keep per-node, per-interval counter samples (used by calibration).
  bool record_history = false;
  /// Score spectra even when the shrew filter is not the active defense.
  bool observe_spectra = false;
};

struct BlockEvent {
  NodeId node{};
  double time_s = 0;
  Defense by = Defense::None;
};

struct IntervalSample {
  std::uint32_t interval = 0;
  double end_s = 0;
  NodeId node{};
  /// Node-local counters for the interval.
  mlda::IntervalCounters local;
  /// RTS from and CTS to the node, as decoded by the passive server.
  std::uint32_t server_rts_cts = 0;
  /// Code the server assigned (000 when no thresholds are configured).
  mlda::CongestionBits server_cb;
};

struct RunResult {
  FlowStats stats;
  std::vector<NodeId> legit_nodes;
  std::vector<NodeId> attacker_nodes;
  std::vector<BlockEvent> blocks;
  std::vector<mlda::DetectionRecord> detections;
  std::vector<shrew::SpectrumVerdict> spectra;
  std::vector<IntervalSample> history;
  /// Legit bits delivered to the wired server, in one-second bins.
  std::vector<double> legit_bits_per_second;
  std::map<NodeId, std::uint64_t> cb_notifications;
  std::uint64_t events = 0;
  std::uint64_t mac_attempts = 0;
  std::uint64_t mac_collisions = 0;
};

/// Runs one self-contained simulation instance. Throws ConfigError when the
/// MLDA defense is selected without thresholds.
RunResult simulate(const RunConfig& config, const RunOptions& options = {});

}  // namespace roqsim

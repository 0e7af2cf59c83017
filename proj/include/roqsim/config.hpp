// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "roqsim/mac.hpp"
#include "roqsim/mlda.hpp"
#include "roqsim/shrew.hpp"

namespace roqsim {

/// Malformed or inconsistent run configuration (user input).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Defense : std::uint8_t { None, Mlda, Shrew };
std::string_view to_string(Defense d);
std::optional<Defense> parse_defense(std::string_view text);

/// Where the server's RTS/CTS condition comes from.
enum class RtsCountSource : std::uint8_t {
  /// The server's own count of decoded RTS from, and CTS to, the node.
  Server,
  /// The node's own count, piggybacked as the c1 bit it stamps.
  Stamped,
};

struct NetworkSpec {
  double backhaul_bps = 1e6;
  std::uint32_t ap_buffer_pkts = 10;
  /// One-way delay between the access point and the wired server.
  double wired_delay_s = 0.1;
};

struct LegitSpec {
  std::uint32_t count = 4;
  std::uint32_t packet_bytes = 1000;
  std::uint32_t rwnd_pkts = 2;
  double start_s = 0.0;
  /// Each flow starts at start_s plus a uniform draw in [0, start_spread_s).
  double start_spread_s = 1.0;
};

struct AttackSpec {
  std::uint32_t count = 0;
  double period_s = 1.0;
  double burst_s = 0.5;
  double rate_pps = 400.0;
  std::uint32_t packet_bytes = 1000;
  double start_s = 10.0;
  /// Fixed burst phase for every attacker; drawn uniformly in [0, period)
  /// per attacker when absent.
  std::optional<double> phase_s;
  double jitter_s = 0.0;

  bool enabled() const { return count > 0 && period_s > 0; }
};

struct MldaSpec {
  std::optional<mlda::Thresholds> thresholds;
  double interval_s = 1.0;
  mlda::Escalation escalation = mlda::Escalation::Streak;
  bool lying_attacker = false;
  RtsCountSource rts_count_source = RtsCountSource::Server;
  double calibration_factor = 1.5;
  double re_floor = 3.0;
};

struct SweepSpec {
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::vector<double> attackers{2, 4, 6, 8};
  std::vector<double> periods{0, 5, 10, 15, 20};
};

struct RunConfig {
  double duration_s = 100.0;
  double warmup_s = 10.0;
  std::uint64_t seed = 1;
  mac::PhyParams phy;
  NetworkSpec network;
  LegitSpec legit;
  AttackSpec attack;
  Defense defense = Defense::None;
  MldaSpec mlda;
  shrew::FilterParams shrew;
  SweepSpec sweep;

  /// Throws ConfigError describing the first violated constraint.
  void validate() const;
};

/// Parses a JSON document. Missing keys keep their defaults; unknown keys and
/// wrong types are rejected with ConfigError.
RunConfig parse_config(std::string_view json_text);
RunConfig load_config(const std::filesystem::path& path);
std::string to_json(const RunConfig& config);

}  // namespace roqsim

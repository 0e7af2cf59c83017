// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "roqsim/config.hpp"
#include "roqsim/scenario.hpp"

namespace roqsim::harness {

/// A simulation inside a sweep failed; the message carries the failing config.
class RunError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunMetrics {
  double legit_bw_bps = 0;
  std::uint64_t legit_loss_pkts = 0;
  double legit_loss_ratio = 0;
  double attack_bw_bps = 0;
  std::uint32_t blocked_nodes = 0;
  std::uint32_t false_blocks = 0;
  bool conserved = false;
};

/// Metrics over the measured window [warmup, duration).
RunMetrics summarize(const RunConfig& config, const RunResult& result);

struct CounterMeans {
  double rts_cts = 0;
  double busy_stop_s = 0;
  double retransmissions = 0;
};

/// factor * mean for each counter, with re_th floored at `re_floor` and the
/// other two kept strictly positive.
mlda::Thresholds thresholds_from_means(const CounterMeans& means, double factor, double re_floor,
                                       double interval_s, Duration min_busy);

/// Runs the attack-free base scenario and derives thresholds from the largest
/// per-node mean of each counter over post-warm-up intervals. Throws
/// ConfigError if the base config has attackers enabled.
mlda::Thresholds calibrate_thresholds(const RunConfig& base);

/// Fills in calibrated thresholds if the config has none. Calibration uses
/// the same config with attackers disabled.
RunConfig with_thresholds(RunConfig config);

enum class Axis : std::uint8_t { Attackers, Period };
std::string_view to_string(Axis axis);

struct SweepRow {
  Axis axis = Axis::Attackers;
  double value = 0;
  Defense defense = Defense::Mlda;
  std::uint64_t seed = 0;
  RunMetrics metrics;
};

struct SweepSummaryRow {
  Axis axis = Axis::Attackers;
  double value = 0;
  Defense defense = Defense::Mlda;
  std::size_t runs = 0;
  double bw_mean = 0, bw_min = 0, bw_max = 0;
  double loss_mean = 0, loss_min = 0, loss_max = 0;
};

/// Applies one axis value to a config: attacker count, or attack period
/// (0 disables the attackers).
RunConfig apply_axis(RunConfig config, Axis axis, double value);

/// Runs every value x {MLDA, Shrew} x seed concurrently. Rows come back in
/// (value, defense, seed) order regardless of completion order.
std::vector<SweepRow> sweep(const RunConfig& base, Axis axis, const std::vector<double>& values,
                            const std::vector<std::uint64_t>& seeds, unsigned threads = 0);

inline std::vector<SweepRow> sweep_attackers(const RunConfig& base, const std::vector<double>& counts,
                                             const std::vector<std::uint64_t>& seeds) {
  return sweep(base, Axis::Attackers, counts, seeds);
}
inline std::vector<SweepRow> sweep_period(const RunConfig& base, const std::vector<double>& periods,
                                          const std::vector<std::uint64_t>& seeds) {
  return sweep(base, Axis::Period, periods, seeds);
}

std::vector<SweepSummaryRow> summarize_sweep(const std::vector<SweepRow>& rows);

/// Bit-exact results header.
inline constexpr std::string_view kResultsHeader =
    "axis,value,defense,seed,legit_bw_bps,legit_loss_pkts,legit_loss_ratio,attack_bw_bps,blocked_nodes,false_blocks";
std::string to_csv_row(const SweepRow& row);
void write_results_csv(std::ostream& out, const std::vector<SweepRow>& rows);

inline constexpr std::string_view kSummaryHeader =
    "axis,value,defense,runs,legit_bw_mean,legit_bw_min,legit_bw_max,legit_loss_mean,legit_loss_min,legit_loss_max";
void write_summary_csv(std::ostream& out, const std::vector<SweepSummaryRow>& rows);

/// "flow,bin,freq_hz,energy"
void write_spectra_csv(std::ostream& out, const std::vector<shrew::SpectrumVerdict>& spectra, double bin_width_s);

}  // namespace roqsim::harness

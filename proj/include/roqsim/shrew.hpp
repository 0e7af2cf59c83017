// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

#include "roqsim/node.hpp"
#include "roqsim/sim_time.hpp"

namespace roqsim::shrew {

class SpectrumError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Packet-arrival counts of one flow, binned at a fixed width.
struct ArrivalSeries {
  NodeId flow{};
  double bin_width_s = 0.05;
  std::vector<double> bins;
};

/// One-sided power spectrum, bins 0..N/2. Interior bins fold in their
/// negative-frequency mirror, so the sum over all bins equals N times the
/// sum of squared (mean-removed) samples.
///
/// Throws SpectrumError unless the length is a power of two of at least 2; pad
/// with zeros to the next power of two first.
std::vector<double> power_spectrum(const ArrivalSeries& series, bool remove_mean = true);

/// Fraction of spectral energy at frequencies <= cutoff_hz. An all-zero
/// spectrum yields 0. Throws SpectrumError unless 0 < cutoff_hz <= Nyquist.
double low_freq_ratio(std::span<const double> spectrum, double cutoff_hz, double bin_width_s);

enum class Verdict : std::uint8_t { Legit, Attack };

/// Attack iff ratio is strictly above the threshold.
inline Verdict classify_flow(double ratio, double threshold) {
  return ratio > threshold ? Verdict::Attack : Verdict::Legit;
}

struct SpectrumVerdict {
  NodeId flow{};
  double low_freq_energy_ratio = 0;
  double cutoff_hz = 0;
  double threshold = 0;
  Verdict verdict = Verdict::Legit;
  std::vector<double> spectrum;
};

struct FilterParams {
  double bin_width_s = 0.05;
  std::uint32_t window_bins = 1024;
  double cutoff_hz = 5.0;
  double threshold = 0.7;
};

/// Accumulates per-flow arrival series over consecutive non-overlapping
/// windows and scores each flow when a window closes.
class SpectralFilter {
 public:
  SpectralFilter(FilterParams params, SimTime window_start);

  void record_arrival(NodeId flow, SimTime at);
  /// Registers a flow so it is scored even if it never delivers a packet.
  void track(NodeId flow);

  /// Scores every tracked flow if the current window has closed by `now`;
  /// otherwise returns an empty vector.
  std::vector<SpectrumVerdict> close_window_if_due(SimTime now);

  SimTime window_end() const;
  const FilterParams& params() const { return params_; }

 private:
  FilterParams params_;
  SimTime window_start_;
  std::map<NodeId, std::vector<double>> series_;
};

}  // namespace roqsim::shrew

// SPDX-License-Identifier: Apache-2.0
#include "roqsim/shrew.hpp"

#include <fftw3.h>

#include <bit>
#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <numeric>
#include <string>

namespace roqsim::shrew {

namespace {

// FFTW's planner is not thread-safe; executing a finished plan is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(p);
  }
};

}  // namespace

std::vector<double> power_spectrum(const ArrivalSeries& series, bool remove_mean) {
  const std::size_t n = series.bins.size();
  if (n < 2 || !std::has_single_bit(n)) {
    throw SpectrumError("series length " + std::to_string(n) +
                        " is not a power of two >= 2; zero-pad to the next power of two");
  }
  std::vector<double> samples(series.bins);
  if (remove_mean) {
    const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(n);
    for (double& s : samples) s -= mean;
  }

  std::vector<std::complex<double>> out(n / 2 + 1);
  std::unique_ptr<fftw_plan_s, PlanDeleter> plan;
  {
    std::lock_guard lock(planner_mutex());
    plan.reset(fftw_plan_dft_r2c_1d(static_cast<int>(n), samples.data(),
                                    reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE));
  }
  fftw_execute(plan.get());

  std::vector<double> energy(out.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double e = std::norm(out[k]);
    energy[k] = (k == 0 || k == n / 2) ? e : 2.0 * e;
  }
  return energy;
}

double low_freq_ratio(std::span<const double> spectrum, double cutoff_hz, double bin_width_s) {
  if (spectrum.size() < 2 || !(bin_width_s > 0)) throw SpectrumError("spectrum too short or bad bin width");
  const double nyquist = 1.0 / (2.0 * bin_width_s);
  if (!(cutoff_hz > 0) || cutoff_hz > nyquist) {
    throw SpectrumError("cutoff " + std::to_string(cutoff_hz) + " Hz outside (0, " + std::to_string(nyquist) + "]");
  }
  const double n = 2.0 * static_cast<double>(spectrum.size() - 1);
  const double resolution = 1.0 / (n * bin_width_s);
  double low = 0;
  double total = 0;
  for (std::size_t k = 0; k < spectrum.size(); ++k) {
    total += spectrum[k];
    // Relative slack so a bin sitting exactly on the cutoff counts as low.
    if (static_cast<double>(k) * resolution <= cutoff_hz * (1 + 1e-12)) low += spectrum[k];
  }
  return total > 0 ? low / total : 0.0;
}

SpectralFilter::SpectralFilter(FilterParams params, SimTime window_start)
    : params_(params), window_start_(window_start) {
  if (!std::has_single_bit(params_.window_bins)) throw SpectrumError("window_bins must be a power of two");
  if (!(params_.bin_width_s > 0)) throw SpectrumError("bin width must be positive");
}

SimTime SpectralFilter::window_end() const {
  return window_start_ + Duration::seconds(params_.bin_width_s * params_.window_bins);
}

void SpectralFilter::track(NodeId flow) { series_.try_emplace(flow, params_.window_bins, 0.0); }

void SpectralFilter::record_arrival(NodeId flow, SimTime at) {
  if (at < window_start_ || at >= window_end()) return;
  auto& bins = series_.try_emplace(flow, params_.window_bins, 0.0).first->second;
  const auto idx = static_cast<std::size_t>((at - window_start_).seconds() / params_.bin_width_s);
  if (idx < bins.size()) bins[idx] += 1.0;
}

std::vector<SpectrumVerdict> SpectralFilter::close_window_if_due(SimTime now) {
  std::vector<SpectrumVerdict> verdicts;
  if (now < window_end()) return verdicts;
  for (auto& [flow, bins] : series_) {
    ArrivalSeries series{flow, params_.bin_width_s, bins};
    SpectrumVerdict v;
    v.flow = flow;
    v.spectrum = power_spectrum(series);
    v.low_freq_energy_ratio = low_freq_ratio(v.spectrum, params_.cutoff_hz, params_.bin_width_s);
    v.cutoff_hz = params_.cutoff_hz;
    v.threshold = params_.threshold;
    v.verdict = classify_flow(v.low_freq_energy_ratio, params_.threshold);
    verdicts.push_back(std::move(v));
    std::fill(bins.begin(), bins.end(), 0.0);
  }
  window_start_ = window_end();
  return verdicts;
}

}  // namespace roqsim::shrew

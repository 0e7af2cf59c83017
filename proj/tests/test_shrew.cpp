// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <vector>

#include "roqsim/shrew.hpp"

using namespace roqsim;
using namespace roqsim::shrew;

namespace {

std::vector<double> naive_spectrum(std::vector<double> x, bool remove_mean) {
  const std::size_t n = x.size();
  if (remove_mean) {
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    for (double& v : x) v -= mean;
  }
  std::vector<double> out(n / 2 + 1);
  for (std::size_t k = 0; k <= n / 2; ++k) {
    double re = 0, im = 0;
    for (std::size_t t = 0; t < n; ++t) {
      const double ang = -2.0 * std::numbers::pi * static_cast<double>(k * t) / static_cast<double>(n);
      re += x[t] * std::cos(ang);
      im += x[t] * std::sin(ang);
    }
    const double mag = re * re + im * im;
    out[k] = (k == 0 || k == n / 2) ? mag : 2.0 * mag;
  }
  return out;
}

ArrivalSeries series(std::vector<double> bins, double width = 0.05) { return ArrivalSeries{NodeId{1}, width, std::move(bins)}; }

std::vector<double> cosine(std::size_t n, double bin) {
  std::vector<double> x(n);
  for (std::size_t t = 0; t < n; ++t) {
    x[t] = std::cos(2.0 * std::numbers::pi * bin * static_cast<double>(t) / static_cast<double>(n));
  }
  return x;
}

}  // namespace

TEST_CASE("constant series has no energy after mean removal") {
  const auto s = power_spectrum(series(std::vector<double>(64, 3.0)));
  for (double e : s) CHECK(e == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(low_freq_ratio(s, 5.0, 0.05) == 0.0);
}

TEST_CASE("pure tone lands in its bin") {
  const auto s = power_spectrum(series(cosine(64, 4)));
  const double total = std::accumulate(s.begin(), s.end(), 0.0);
  CHECK(s[4] / total > 0.999);
}

TEST_CASE("matches direct summation") {
  std::mt19937_64 rng(3);
  std::poisson_distribution<int> arrivals(2.5);
  std::vector<double> x(128);
  for (double& v : x) v = arrivals(rng);
  for (bool remove_mean : {true, false}) {
    const auto fast = power_spectrum(series(x), remove_mean);
    const auto slow = naive_spectrum(x, remove_mean);
    REQUIRE(fast.size() == slow.size());
    for (std::size_t k = 0; k < fast.size(); ++k) CHECK(fast[k] == doctest::Approx(slow[k]).epsilon(1e-9));
  }
}

TEST_CASE("Parseval on random series") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x(256);
    for (double& v : x) v = g(rng);
    const auto s = power_spectrum(series(x), false);
    const double energy = std::accumulate(s.begin(), s.end(), 0.0);
    const double time = std::inner_product(x.begin(), x.end(), x.begin(), 0.0) * 256.0;
    CHECK(std::abs(energy - time) <= 1e-9 * time);
  }
}

TEST_CASE("length must be a power of two") {
  CHECK_THROWS_AS(power_spectrum(series(std::vector<double>(100, 1.0))), SpectrumError);
  CHECK_THROWS_AS(power_spectrum(series(std::vector<double>(1, 1.0))), SpectrumError);
}

TEST_CASE("low-frequency ratio") {
  // 64 bins of 50 ms: resolution 0.3125 Hz, Nyquist 10 Hz.
  const auto dc = power_spectrum(series(std::vector<double>(64, 2.0)), false);
  CHECK(low_freq_ratio(dc, 5.0, 0.05) == doctest::Approx(1.0));

  const auto high = power_spectrum(series(cosine(64, 24)));
  CHECK(low_freq_ratio(high, 5.0, 0.05) == doctest::Approx(0.0).epsilon(1e-9));

  const auto low = power_spectrum(series(cosine(64, 3)));
  CHECK(low_freq_ratio(low, 5.0, 0.05) == doctest::Approx(1.0));

  // Bin 16 sits exactly on the 5 Hz cutoff and counts as low.
  const auto edge = power_spectrum(series(cosine(64, 16)));
  CHECK(low_freq_ratio(edge, 5.0, 0.05) == doctest::Approx(1.0));

  CHECK_THROWS_AS(low_freq_ratio(low, 11.0, 0.05), SpectrumError);
  CHECK_THROWS_AS(low_freq_ratio(low, 0.0, 0.05), SpectrumError);
}

TEST_CASE("ratio agrees with a brute-force sum") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 4.0);
  std::vector<double> x(256);
  for (double& v : x) v = u(rng);
  const auto s = naive_spectrum(x, true);
  double low = 0, total = 0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    total += s[k];
    if (static_cast<double>(k) / (256 * 0.05) <= 2.0) low += s[k];
  }
  CHECK(low_freq_ratio(power_spectrum(series(x)), 2.0, 0.05) == doctest::Approx(low / total).epsilon(1e-9));
}

TEST_CASE("verdict threshold") {
  CHECK(classify_flow(0.9, 0.7) == Verdict::Attack);
  CHECK(classify_flow(0.7, 0.7) == Verdict::Legit);
  CHECK(classify_flow(0.1, 0.7) == Verdict::Legit);
}

TEST_CASE("filter scores flows once per window") {
  FilterParams p{0.05, 64, 5.0, 0.7};
  SpectralFilter f(p, SimTime::seconds(10));
  CHECK(f.window_end() == SimTime::seconds(13.2));
  f.track(NodeId{3});
  // On for the first half of every second, silent otherwise.
  for (int i = 0; i < 64; ++i) {
    const double t = 10.0 + 0.05 * i;
    if (std::fmod(t - 10.0, 1.0) < 0.5) {
      for (int k = 0; k < 5; ++k) f.record_arrival(NodeId{5}, SimTime::seconds(t + 0.001 * k));
    }
  }
  f.record_arrival(NodeId{5}, SimTime::seconds(9.0));
  CHECK(f.close_window_if_due(SimTime::seconds(13.0)).empty());
  const auto v = f.close_window_if_due(SimTime::seconds(13.2));
  REQUIRE(v.size() == 2);
  CHECK(v[0].flow == NodeId{3});
  CHECK(v[0].low_freq_energy_ratio == 0.0);
  CHECK(v[0].verdict == Verdict::Legit);
  CHECK(v[1].flow == NodeId{5});
  CHECK(v[1].low_freq_energy_ratio > 0.7);
  CHECK(v[1].verdict == Verdict::Attack);
  CHECK(v[1].spectrum.size() == 33);
  CHECK(f.window_end() == SimTime::seconds(16.4));
  const auto next = f.close_window_if_due(SimTime::seconds(16.4));
  REQUIRE(next.size() == 2);
  CHECK(next[1].low_freq_energy_ratio == 0.0);
}

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <string>

namespace roqsim {

/// A span of virtual time with 1 microsecond resolution.
class Duration {
 public:
  constexpr Duration() = default;
  static constexpr Duration micros(std::int64_t us) { return Duration(us); }
  static Duration seconds(double s) { return Duration(static_cast<std::int64_t>(std::llround(s * 1e6))); }

  constexpr std::int64_t micros() const { return us_; }
  constexpr double seconds() const { return static_cast<double>(us_) * 1e-6; }

  constexpr auto operator<=>(const Duration&) const = default;
  constexpr Duration operator+(Duration o) const { return Duration(us_ + o.us_); }
  constexpr Duration operator-(Duration o) const { return Duration(us_ - o.us_); }
  constexpr Duration operator*(std::int64_t k) const { return Duration(us_ * k); }
  constexpr Duration& operator+=(Duration o) {
    us_ += o.us_;
    return *this;
  }

 private:
  constexpr explicit Duration(std::int64_t us) : us_(us) {}
  std::int64_t us_ = 0;
};

/// An absolute point on the simulation clock. Never negative.
class SimTime {
 public:
  constexpr SimTime() = default;
  static constexpr SimTime micros(std::int64_t us) { return SimTime(us); }
  static SimTime seconds(double s) { return SimTime(static_cast<std::int64_t>(std::llround(s * 1e6))); }

  constexpr std::int64_t micros() const { return us_; }
  constexpr double seconds() const { return static_cast<double>(us_) * 1e-6; }

  constexpr auto operator<=>(const SimTime&) const = default;
  constexpr SimTime operator+(Duration d) const { return SimTime(us_ + d.micros()); }
  constexpr Duration operator-(SimTime o) const { return Duration::micros(us_ - o.us_); }

  /// Fixed six-decimal seconds, e.g. "12.000250".
  std::string to_string() const;

 private:
  constexpr explicit SimTime(std::int64_t us) : us_(us) {}
  std::int64_t us_ = 0;
};

}  // namespace roqsim

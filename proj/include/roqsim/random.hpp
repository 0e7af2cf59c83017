// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>

namespace roqsim {

/// Seeded pseudo-random source. Substreams forked by id are independent of
/// how many other substreams exist, so adding a node leaves the draws of
/// every other node untouched.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : seed_(seed), engine_(mix(seed)) {}

  std::uint64_t seed() const { return seed_; }

  RandomSource fork(std::uint64_t stream) const;

  /// Uniform integer in [lo, hi]. Throws DefectError when lo > hi.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  /// Uniform real in [lo, hi).
  double uniform_real(double lo, double hi);

  /// SplitMix64 finalizer; also used for counter-based draws.
  static std::uint64_t mix(std::uint64_t x);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace roqsim

// SPDX-License-Identifier: Apache-2.0
#include "roqsim/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "roqsim/random.hpp"

namespace roqsim::traffic {

void legit_on_ack(LegitFlow& flow, std::optional<double> rtt_sample) {
  if (rtt_sample) {
    const double r = *rtt_sample;
    if (!flow.srtt) {
      flow.srtt = r;
      flow.rttvar = r / 2.0;
    } else {
      flow.rttvar = 0.75 * flow.rttvar + 0.25 * std::abs(*flow.srtt - r);
      flow.srtt = 0.875 * *flow.srtt + 0.125 * r;
    }
  }
  if (flow.srtt) flow.rto = std::clamp(*flow.srtt + 4.0 * flow.rttvar, kMinRto, kMaxRto);

  if (flow.state == TcpState::TimeoutBackoff) flow.state = TcpState::SlowStart;
  if (flow.state == TcpState::SlowStart) {
    flow.cwnd += 1.0;
    if (flow.cwnd >= flow.ssthresh) flow.state = TcpState::CongestionAvoidance;
  } else {
    // One packet per window's worth of ACKs.
    flow.cwnd += 1.0 / std::floor(flow.cwnd);
  }
}

void legit_on_timeout(LegitFlow& flow) {
  flow.ssthresh = std::max(flow.cwnd / 2.0, 2.0);
  flow.cwnd = 1.0;
  flow.rto = std::min(flow.rto * 2.0, kMaxRto);
  flow.state = TcpState::TimeoutBackoff;
}

void AttackerFlow::validate() const {
  if (period_s < 0) throw std::invalid_argument("attack period must be >= 0");
  if (!enabled()) return;
  if (burst_len_s < 0 || burst_len_s > period_s) throw std::invalid_argument("burst length must lie in [0, period]");
  if (!(burst_rate_pps > 0)) throw std::invalid_argument("burst rate must be > 0");
  if (jitter_s < 0 || 2.0 * jitter_s > period_s - burst_len_s) {
    throw std::invalid_argument("jitter must satisfy 0 <= 2*jitter <= period - burst length");
  }
}

double burst_start(const AttackerFlow& flow, std::int64_t k) {
  double start = flow.offset_s + static_cast<double>(k) * flow.period_s;
  if (flow.jitter_s > 0) {
    const std::uint64_t h = RandomSource::mix(flow.jitter_seed ^ RandomSource::mix(static_cast<std::uint64_t>(k)));
    const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
    start += (2.0 * u - 1.0) * flow.jitter_s;
  }
  return start;
}

bool is_bursting(const AttackerFlow& flow, double t) {
  if (!flow.enabled() || flow.burst_len_s <= 0) return false;
  const auto k = static_cast<std::int64_t>(std::floor((t - flow.offset_s) / flow.period_s));
  // Jitter is bounded by half the off-time, so only neighbouring periods can overlap t.
  for (std::int64_t j = k - 1; j <= k + 1; ++j) {
    if (j < 0) continue;
    const double s = burst_start(flow, j);
    if (t >= s && t < s + flow.burst_len_s) return true;
  }
  return false;
}

std::optional<double> next_burst_time(const AttackerFlow& flow, double t) {
  if (!flow.enabled() || flow.burst_len_s <= 0) return std::nullopt;
  if (is_bursting(flow, t)) return t;
  auto k = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor((t - flow.offset_s) / flow.period_s)) - 1);
  for (;; ++k) {
    const double s = burst_start(flow, k);
    if (s >= t) return s;
  }
}

}  // namespace roqsim::traffic

// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "roqsim/traffic.hpp"

using namespace roqsim;
using namespace roqsim::traffic;

TEST_CASE("burst window membership") {
  AttackerFlow a;
  a.period_s = 5;
  a.burst_len_s = 1;
  CHECK(is_bursting(a, 0.0));
  CHECK(is_bursting(a, 0.5));
  CHECK_FALSE(is_bursting(a, 1.0));
  CHECK_FALSE(is_bursting(a, 4.999));
  CHECK(is_bursting(a, 5.0));
  CHECK_FALSE(is_bursting(a, -0.5));

  AttackerFlow off = a;
  off.period_s = 0;
  CHECK_FALSE(is_bursting(off, 0.5));
  CHECK_FALSE(next_burst_time(off, 0.0).has_value());
}

TEST_CASE("next burst time") {
  AttackerFlow a;
  a.period_s = 2;
  a.burst_len_s = 0.5;
  a.offset_s = 10;
  CHECK(*next_burst_time(a, 0.0) == doctest::Approx(10.0));
  CHECK(*next_burst_time(a, 10.25) == doctest::Approx(10.25));
  CHECK(*next_burst_time(a, 10.5) == doctest::Approx(12.0));
  CHECK(*next_burst_time(a, 13.9) == doctest::Approx(14.0));
}

TEST_CASE("duty cycle over many periods") {
  for (double jitter : {0.0, 0.2}) {
    AttackerFlow a;
    a.period_s = 1.0;
    a.burst_len_s = 0.3;
    a.offset_s = 0.37;
    a.jitter_s = jitter;
    a.jitter_seed = 77;
    a.validate();
    const double horizon = 60.0;
    const double dt = 1e-4;
    long on = 0;
    long total = 0;
    for (double t = a.offset_s; t < a.offset_s + horizon; t += dt, ++total) on += is_bursting(a, t) ? 1 : 0;
    const double duty = static_cast<double>(on) / static_cast<double>(total);
    CHECK(std::abs(duty - 0.3) <= 0.05 * 0.3);
  }
}

TEST_CASE("jittered burst starts stay within bounds and vary") {
  AttackerFlow a;
  a.period_s = 1.0;
  a.burst_len_s = 0.3;
  a.jitter_s = 0.2;
  a.jitter_seed = 5;
  int moved = 0;
  for (int k = 0; k < 100; ++k) {
    const double s = burst_start(a, k);
    CHECK(std::abs(s - k) <= 0.2 + 1e-12);
    moved += std::abs(s - k) > 1e-6 ? 1 : 0;
  }
  CHECK(moved > 90);
  a.jitter_s = 0.4;
  CHECK_THROWS_AS(a.validate(), std::invalid_argument);
}

TEST_CASE("attacker validation") {
  AttackerFlow a;
  a.period_s = 1;
  a.burst_len_s = 2;
  CHECK_THROWS_AS(a.validate(), std::invalid_argument);
  a.burst_len_s = 0.5;
  a.burst_rate_pps = 0;
  CHECK_THROWS_AS(a.validate(), std::invalid_argument);
  a.period_s = 0;
  CHECK_NOTHROW(a.validate());
}

TEST_CASE("first RTT sample seeds the estimator") {
  LegitFlow f;
  legit_on_ack(f, 0.1);
  REQUIRE(f.srtt.has_value());
  CHECK(*f.srtt == doctest::Approx(0.1));
  CHECK(f.rttvar == doctest::Approx(0.05));
  CHECK(f.rto == doctest::Approx(1.0));
}

TEST_CASE("estimator follows the standard gains") {
  LegitFlow f;
  double srtt = 0, rttvar = 0;
  bool first = true;
  const double samples[] = {0.8, 1.2, 0.9, 2.5, 0.3, 1.1};
  for (double r : samples) {
    legit_on_ack(f, r);
    if (first) {
      srtt = r;
      rttvar = r / 2;
      first = false;
    } else {
      rttvar = 0.75 * rttvar + 0.25 * std::abs(srtt - r);
      srtt = 0.875 * srtt + 0.125 * r;
    }
    CHECK(*f.srtt == doctest::Approx(srtt));
    CHECK(f.rttvar == doctest::Approx(rttvar));
    CHECK(f.rto == doctest::Approx(std::clamp(srtt + 4 * rttvar, 1.0, 64.0)));
  }
  const double before = *f.srtt;
  legit_on_ack(f, std::nullopt);
  CHECK(*f.srtt == before);
}

TEST_CASE("slow start and congestion avoidance growth") {
  LegitFlow f;
  f.cwnd = 2;
  legit_on_ack(f, std::nullopt);
  CHECK(f.cwnd == doctest::Approx(3));
  CHECK(f.state == TcpState::SlowStart);

  LegitFlow g;
  g.cwnd = 4;
  g.ssthresh = 4;
  g.state = TcpState::CongestionAvoidance;
  for (int i = 0; i < 4; ++i) legit_on_ack(g, std::nullopt);
  CHECK(g.cwnd == doctest::Approx(5));

  LegitFlow h;
  h.cwnd = 3;
  h.ssthresh = 4;
  legit_on_ack(h, std::nullopt);
  CHECK(h.state == TcpState::CongestionAvoidance);
}

TEST_CASE("timeout halves the threshold and backs off the timer") {
  LegitFlow f;
  f.cwnd = 8;
  f.rto = 1;
  legit_on_timeout(f);
  CHECK(f.ssthresh == doctest::Approx(4));
  CHECK(f.cwnd == doctest::Approx(1));
  CHECK(f.rto == doctest::Approx(2));
  CHECK(f.state == TcpState::TimeoutBackoff);

  f.rto = 64;
  legit_on_timeout(f);
  CHECK(f.rto == doctest::Approx(64));
  CHECK(f.ssthresh == doctest::Approx(2));

  legit_on_ack(f, std::nullopt);
  CHECK(f.cwnd == doctest::Approx(2));
  CHECK(f.state == TcpState::CongestionAvoidance);
}

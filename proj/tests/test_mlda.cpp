// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>
#include <vector>

#include "roqsim/mlda.hpp"

using namespace roqsim;
using namespace roqsim::mlda;

namespace {

const Thresholds kTh{10.0, 0.002, 3.0, 1.0};
const NodeId kNode{7};

IntervalCounters counters(std::uint32_t rc, std::int64_t busy_us, std::uint32_t re) {
  return IntervalCounters{rc, Duration::micros(busy_us), re};
}

CongestionBits cb(const char* text) { return *CongestionBits::parse(text); }

std::vector<IntervalOutcome> feed(MonitorState& st, const std::vector<const char*>& codes,
                                  Escalation mode = Escalation::Streak) {
  std::vector<IntervalOutcome> out;
  for (const char* c : codes) out.push_back(monitor_interval(st, {{kNode, cb(c)}}, mode));
  return out;
}

int first_block(const std::vector<IntervalOutcome>& outs) {
  for (std::size_t i = 0; i < outs.size(); ++i) {
    for (const auto& a : outs[i].actions) {
      if (a.kind == Action::Kind::Block) return static_cast<int>(i) + 1;
    }
  }
  return 0;
}

}  // namespace

TEST_CASE("congestion bits: exhaustive boundary table") {
  // At the threshold a bit stays clear; one unit above sets it.
  for (int code = 0; code < 8; ++code) {
    const bool c1 = (code & 4) != 0, c2 = (code & 2) != 0, c3 = (code & 1) != 0;
    const IntervalCounters above = counters(c1 ? 11 : 10, c2 ? 2001 : 2000, c3 ? 4 : 3);
    CHECK(compute_cb(above, kTh) == CongestionBits(c1, c2, c3));
    CHECK(compute_cb(above, kTh).code() == code);
  }
  CHECK(compute_cb(counters(10, 2000, 3), kTh).none());
  CHECK(compute_cb(counters(0, 0, 0), kTh).none());
}

TEST_CASE("congestion bits: parse and render") {
  CHECK(cb("101").to_string() == "101");
  CHECK(cb("101").c1());
  CHECK_FALSE(cb("101").c2());
  CHECK(cb("011").popcount() == 2);
  CHECK((cb("100") | cb("001")) == cb("101"));
  CHECK_FALSE(CongestionBits::parse("12").has_value());
  CHECK_FALSE(CongestionBits::parse("1a1").has_value());
  CHECK_FALSE(CongestionBits::parse("0000").has_value());
}

TEST_CASE("classification by bit count") {
  CHECK(classify_cb(cb("000")) == Finding::NoFinding);
  CHECK(classify_cb(cb("010")) == Finding::Normal);
  CHECK(classify_cb(cb("101")) == Finding::Suspected);
  CHECK(classify_cb(cb("111")) == Finding::Attacker);
}

TEST_CASE("three attacker intervals block") {
  MonitorState st;
  const auto outs = feed(st, {"111", "111", "111"});
  CHECK(first_block(outs) == 3);
  CHECK(is_blocked(st, kNode));
  CHECK(st.nodes[kNode].status == Status::Blocked);
}

TEST_CASE("four suspected intervals block") {
  MonitorState st;
  CHECK(first_block(feed(st, {"110", "011", "101", "110"})) == 4);
}

TEST_CASE("a clean interval breaks the streak") {
  MonitorState st;
  CHECK(first_block(feed(st, {"111", "000", "111", "111"})) == 0);
  CHECK_FALSE(is_blocked(st, kNode));
  MonitorState st2;
  CHECK(first_block(feed(st2, {"111", "111", "100", "111", "111"})) == 0);
}

TEST_CASE("mixed findings do not add up") {
  MonitorState st;
  CHECK(first_block(feed(st, {"111", "011", "111", "111"})) == 0);
  MonitorState st2;
  CHECK(first_block(feed(st2, {"011", "011", "011", "111", "011"})) == 0);
}

TEST_CASE("a quiet node produces no actions") {
  MonitorState st;
  for (const auto& o : feed(st, std::vector<const char*>(20, "000"))) {
    CHECK(o.actions.empty());
    CHECK(o.records.empty());
  }
}

TEST_CASE("non-zero codes are forwarded with the finding") {
  MonitorState st;
  const auto outs = feed(st, {"010", "000", "110"});
  REQUIRE(outs[0].actions.size() == 1);
  CHECK(outs[0].actions[0] == Action{Action::Kind::TransmitCb, kNode, cb("010")});
  CHECK(outs[1].actions.empty());
  REQUIRE(outs[2].records.size() == 1);
  CHECK(outs[2].records[0].status == Status::Suspected);
  CHECK(to_csv_row(outs[2].records[0]) == "3,7,110,suspected,transmit_cb");
}

TEST_CASE("blocking is absorbing") {
  MonitorState st;
  feed(st, {"111", "111", "111"});
  const auto later = feed(st, {"000", "010", "111"});
  for (const auto& o : later) CHECK(o.actions.empty());
  CHECK(is_blocked(st, kNode));
  CHECK(st.nodes[kNode].status == Status::Blocked);
}

TEST_CASE("absolute mode only blocks at the fixed intervals") {
  MonitorState a;
  CHECK(first_block(feed(a, {"111", "111", "111"}, Escalation::Absolute)) == 3);
  MonitorState b;
  CHECK(first_block(feed(b, {"000", "000", "000", "011"}, Escalation::Absolute)) == 4);
  MonitorState c;
  CHECK(first_block(feed(c, {"111", "111", "111", "111"}, Escalation::Absolute)) == 3);
  MonitorState d;
  CHECK(first_block(feed(d, {"000", "000", "000", "000", "111", "111", "111"}, Escalation::Absolute)) == 0);
  MonitorState e;
  CHECK(first_block(feed(e, {"000", "000", "011", "111"}, Escalation::Absolute)) == 0);
}

TEST_CASE("nodes are tracked independently") {
  MonitorState st;
  const NodeId a{1}, b{2};
  for (int i = 0; i < 3; ++i) monitor_interval(st, {{a, cb("111")}, {b, cb("100")}}, Escalation::Streak);
  CHECK(is_blocked(st, a));
  CHECK_FALSE(is_blocked(st, b));
  CHECK(st.nodes[b].status == Status::Normal);
}

TEST_CASE("counter overload derives the codes") {
  MonitorState st;
  for (int i = 0; i < 3; ++i) monitor_interval(st, {{kNode, counters(50, 9000, 9)}}, kTh, Escalation::Streak);
  CHECK(is_blocked(st, kNode));
}

TEST_CASE("threshold validation") {
  CHECK_NOTHROW(kTh.validate());
  Thresholds bad = kTh;
  bad.rc_th = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  CHECK(detection_log_header() == "interval,node,cb,status,action");
}

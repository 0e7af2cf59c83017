// SPDX-License-Identifier: Apache-2.0
#include "roqsim/mlda.hpp"

#include <stdexcept>

namespace roqsim::mlda {

void Thresholds::validate() const {
  if (!(rc_th > 0) || !(se_th_s > 0) || !(re_th > 0) || !(interval_s > 0)) {
    throw std::invalid_argument("thresholds must be strictly positive");
  }
}

std::optional<CongestionBits> CongestionBits::parse(std::string_view text) {
  if (text.size() != 3) return std::nullopt;
  std::uint8_t code = 0;
  for (char ch : text) {
    if (ch != '0' && ch != '1') return std::nullopt;
    code = static_cast<std::uint8_t>((code << 1) | (ch == '1' ? 1 : 0));
  }
  return from_code(code);
}

std::string CongestionBits::to_string() const {
  return {c1() ? '1' : '0', c2() ? '1' : '0', c3() ? '1' : '0'};
}

CongestionBits compute_cb(const IntervalCounters& counters, const Thresholds& th) {
  return CongestionBits(static_cast<double>(counters.rts_cts_count) > th.rc_th,
                        counters.busy_stop_time.seconds() > th.se_th_s,
                        static_cast<double>(counters.retransmissions) > th.re_th);
}

Finding classify_cb(CongestionBits cb) {
  switch (cb.popcount()) {
    case 0:
      return Finding::NoFinding;
    case 1:
      return Finding::Normal;
    case 2:
      return Finding::Suspected;
    default:
      return Finding::Attacker;
  }
}

std::string_view to_string(Finding f) {
  switch (f) {
    case Finding::NoFinding:
      return "none";
    case Finding::Normal:
      return "normal";
    case Finding::Suspected:
      return "suspected";
    case Finding::Attacker:
      return "attacker";
  }
  return "unknown";
}

std::string_view to_string(Status s) {
  switch (s) {
    case Status::Normal:
      return "normal";
    case Status::Suspected:
      return "suspected";
    case Status::Attacker:
      return "attacker";
    case Status::Blocked:
      return "blocked";
  }
  return "unknown";
}

namespace {

bool escalates(const NodeStatus& ns, std::uint32_t interval, Escalation mode) {
  if (mode == Escalation::Streak) return ns.attacker_streak >= 3 || ns.suspected_streak >= 4;
  return (interval == 3 && ns.status == Status::Attacker) || (interval == 4 && ns.status == Status::Suspected);
}

}  // namespace

IntervalOutcome monitor_interval(MonitorState& state, const std::map<NodeId, CongestionBits>& findings,
                                 Escalation mode) {
  IntervalOutcome out;
  const std::uint32_t interval = ++state.interval_index;
  for (const auto& [node, cb] : findings) {
    if (state.blocklist.contains(node)) continue;
    NodeStatus& ns = state.nodes[node];
    if (ns.status == Status::Blocked) continue;

    switch (classify_cb(cb)) {
      case Finding::NoFinding:
        ns.attacker_streak = 0;
        ns.suspected_streak = 0;
        break;
      case Finding::Normal:
        ns.status = Status::Normal;
        ns.attacker_streak = 0;
        ns.suspected_streak = 0;
        break;
      case Finding::Suspected:
        ns.status = Status::Suspected;
        ns.attacker_streak = 0;
        ++ns.suspected_streak;
        break;
      case Finding::Attacker:
        ns.status = Status::Attacker;
        ns.suspected_streak = 0;
        ++ns.attacker_streak;
        break;
    }
    if (!cb.none()) out.actions.push_back(Action{Action::Kind::TransmitCb, node, cb});

    const bool block = escalates(ns, interval, mode);
    if (block) {
      ns.status = Status::Blocked;
      state.blocklist.insert(node);
      out.actions.push_back(Action{Action::Kind::Block, node, cb});
    }
    if (!cb.none() || block) out.records.push_back(DetectionRecord{interval, node, cb, ns.status, block});
  }
  return out;
}

IntervalOutcome monitor_interval(MonitorState& state, const std::map<NodeId, IntervalCounters>& observations,
                                 const Thresholds& th, Escalation mode) {
  std::map<NodeId, CongestionBits> findings;
  for (const auto& [node, counters] : observations) findings.emplace(node, compute_cb(counters, th));
  return monitor_interval(state, findings, mode);
}

bool is_blocked(const MonitorState& state, NodeId node) { return state.blocklist.contains(node); }

std::string detection_log_header() { return "interval,node,cb,status,action"; }

std::string to_csv_row(const DetectionRecord& r) {
  std::string row = std::to_string(r.interval) + ',' + std::to_string(r.node.value) + ',' + r.cb.to_string() + ',' +
                    std::string(to_string(r.status)) + ',';
  row += r.blocked_now ? "block" : "transmit_cb";
  return row;
}

}  // namespace roqsim::mlda

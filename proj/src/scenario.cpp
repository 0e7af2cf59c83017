// SPDX-License-Identifier: Apache-2.0
#include "roqsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <unordered_map>

#include "roqsim/mac.hpp"
#include "roqsim/random.hpp"
#include "roqsim/simulator.hpp"
#include "roqsim/traffic.hpp"

namespace roqsim {

namespace {

using mlda::CongestionBits;

constexpr std::uint64_t kTrafficStreamBase = 0x10000;

struct SendInfo {
  SimTime sent_at;
  bool retransmitted = false;
};

struct TcpEndpoint {
  std::size_t flow = 0;
  NodeId node{};
  traffic::LegitFlow state;
  std::uint32_t rwnd = 1;
  std::uint64_t una = 0;
  std::uint64_t nxt = 0;
  std::uint64_t high = 0;
  std::unordered_map<std::uint64_t, SendInfo> info;
  std::optional<EventHandle> rto_timer;
  // Receiver side, at the wired server.
  std::uint64_t expected = 0;
  std::set<std::uint64_t> out_of_order;
};

struct Attacker {
  std::size_t flow = 0;
  NodeId node{};
  traffic::AttackerFlow spec;
  std::uint64_t seq = 0;
  double next_emit_s = 0;
};

struct Queued {
  std::size_t flow;
  std::uint64_t seq;
  std::uint32_t bits;
};

class Scenario {
 public:
  Scenario(const RunConfig& config, const RunOptions& options)
      : cfg_(config), opts_(options), root_(config.seed), wlan_(sim_, config.phy) {
    if (cfg_.defense == Defense::Mlda && !cfg_.mlda.thresholds) {
      throw ConfigError("the mlda defense needs thresholds; run calibration first");
    }
    sim_.set_trace(opts_.trace);
    build();
  }

  RunResult run() {
    sim_.run_until(SimTime::seconds(cfg_.duration_s));
    finish();
    return std::move(result_);
  }

 private:
  double now_s() const { return sim_.now().seconds(); }
  bool measuring() const { return now_s() >= cfg_.warmup_s; }
  std::size_t flow_of(NodeId node) const { return node.value - 1; }

  void build() {
    const std::uint32_t n_legit = cfg_.legit.count;
    const std::uint32_t n_attack = cfg_.attack.enabled() ? cfg_.attack.count : 0;

    for (std::uint32_t i = 0; i < n_legit + n_attack; ++i) {
      const NodeId node{i + 1};
      wlan_.add_station(node, root_.fork(node.value));
      FlowRecord rec;
      rec.node = node;
      rec.cls = i < n_legit ? FlowClass::Legit : FlowClass::Attack;
      result_.stats.flows.push_back(rec);
      (rec.cls == FlowClass::Legit ? result_.legit_nodes : result_.attacker_nodes).push_back(node);
      stamps_[node] = CongestionBits{};
    }
    wired_bits_.assign(result_.stats.flows.size(), 0);
    wired_pkts_.assign(result_.stats.flows.size(), 0);
    result_.legit_bits_per_second.assign(static_cast<std::size_t>(std::ceil(cfg_.duration_s)), 0.0);

    mac::Wlan::Hooks hooks;
    hooks.refuse_cts = [this](NodeId n) { return blocklist_.contains(n); };
    hooks.delivered = [this](NodeId n, const mac::Packet& p) { ap_receive(n, p); };
    hooks.dropped = [this](NodeId, const mac::Packet& p, mac::DropReason why) {
      note_dropped(p.flow, p.bits, why == mac::DropReason::RetryLimit ? &DropBreakdown::mac_retry
                                                                         : &DropBreakdown::mac_queue);
    };
    hooks.tap = [this](const mac::Frame& f) { on_tap(f); };
    hooks.stamp = [this](NodeId n) { return stamps_.at(n); };
    wlan_.set_hooks(std::move(hooks));

    for (std::uint32_t i = 0; i < n_legit; ++i) {
      const NodeId node{i + 1};
      RandomSource rng = root_.fork(kTrafficStreamBase + node.value);
      TcpEndpoint ep;
      ep.flow = flow_of(node);
      ep.node = node;
      ep.state.src = node;
      ep.state.dst = kAccessPoint;
      ep.state.packet_bits = 8 * cfg_.legit.packet_bytes;
      ep.rwnd = cfg_.legit.rwnd_pkts;
      tcp_.push_back(std::move(ep));
      const double start =
          cfg_.legit.start_s + (cfg_.legit.start_spread_s > 0 ? rng.uniform_real(0, cfg_.legit.start_spread_s) : 0);
      sim_.schedule(SimTime::seconds(start), EventKind::Traffic, [this, i] { tcp_try_send(tcp_[i]); });
    }

    attackers_.reserve(n_attack);
    for (std::uint32_t j = 0; j < n_attack; ++j) {
      const NodeId node{n_legit + j + 1};
      RandomSource rng = root_.fork(kTrafficStreamBase + node.value);
      Attacker a;
      a.flow = flow_of(node);
      a.node = node;
      a.spec.src = node;
      a.spec.dst = kAccessPoint;
      a.spec.period_s = cfg_.attack.period_s;
      a.spec.burst_len_s = cfg_.attack.burst_s;
      a.spec.burst_rate_pps = cfg_.attack.rate_pps;
      a.spec.packet_bits = 8 * cfg_.attack.packet_bytes;
      const double phase = cfg_.attack.phase_s ? *cfg_.attack.phase_s : rng.uniform_real(0, cfg_.attack.period_s);
      a.spec.offset_s = cfg_.attack.start_s + phase;
      a.spec.jitter_s = cfg_.attack.jitter_s;
      a.spec.jitter_seed = static_cast<std::uint64_t>(rng.uniform_int(0, INT64_MAX));
      a.spec.validate();
      attackers_.push_back(a);
    }
    for (std::size_t j = 0; j < attackers_.size(); ++j) {
      if (auto first = traffic::next_burst_time(attackers_[j].spec, 0.0); first && *first < cfg_.duration_s) {
        attackers_[j].next_emit_s = *first;
        sim_.schedule(SimTime::seconds(*first), EventKind::Traffic, [this, j] { attacker_emit(attackers_[j]); });
      }
    }

    const int intervals = static_cast<int>(std::floor(cfg_.duration_s / cfg_.mlda.interval_s + 1e-9));
    for (int k = 1; k <= intervals; ++k) {
      sim_.schedule(SimTime::seconds(k * cfg_.mlda.interval_s), EventKind::Interval,
                    [this, k] { on_interval(static_cast<std::uint32_t>(k)); });
    }

    if (cfg_.defense == Defense::Shrew || opts_.observe_spectra) {
      spectral_.emplace(cfg_.shrew, SimTime::seconds(cfg_.warmup_s));
      for (const auto& f : result_.stats.flows) spectral_->track(f.node);
      const double window = cfg_.shrew.bin_width_s * cfg_.shrew.window_bins;
      for (double end = cfg_.warmup_s + window; end <= cfg_.duration_s + 1e-9; end += window) {
        sim_.schedule(SimTime::seconds(end), EventKind::Timer, [this] { on_spectral_window(); });
      }
    }
  }

  // Accounting

  void note_sent(std::size_t flow, std::uint32_t bits) {
    auto& rec = result_.stats.flows[flow];
    for (FlowCounters* c : counters_for(rec)) {
      ++c->packets_sent;
      c->bits_sent += bits;
    }
  }

  void note_delivered(std::size_t flow, std::uint32_t bits) {
    auto& rec = result_.stats.flows[flow];
    for (FlowCounters* c : counters_for(rec)) {
      ++c->packets_delivered;
      c->bits_delivered += bits;
    }
    if (rec.cls == FlowClass::Legit) {
      const auto bin = static_cast<std::size_t>(now_s());
      if (bin < result_.legit_bits_per_second.size()) result_.legit_bits_per_second[bin] += bits;
    }
  }

  void note_dropped(std::size_t flow, std::uint32_t bits, std::uint64_t DropBreakdown::*cause) {
    auto& rec = result_.stats.flows[flow];
    for (FlowCounters* c : counters_for(rec)) {
      ++c->packets_dropped;
      c->bits_dropped += bits;
    }
    ++(rec.drops.*cause);
  }

  std::vector<FlowCounters*> counters_for(FlowRecord& rec) {
    if (measuring()) return {&rec.total, &rec.measured};
    return {&rec.total};
  }

  // Legitimate transport

  void tcp_try_send(TcpEndpoint& ep) {
    const auto window = std::min<std::uint64_t>(static_cast<std::uint64_t>(std::floor(ep.state.cwnd)), ep.rwnd);
    while (ep.nxt - ep.una < window) {
      const std::uint64_t seq = ep.nxt++;
      if (seq < ep.high) {
        ep.info[seq].retransmitted = true;
      } else {
        ep.high = seq + 1;
        ep.info[seq] = SendInfo{sim_.now(), false};
      }
      note_sent(ep.flow, ep.state.packet_bits);
      wlan_.enqueue(ep.node, mac::Packet{static_cast<std::uint32_t>(ep.flow), seq, ep.state.packet_bits, sim_.now()});
    }
    if (!ep.rto_timer && ep.nxt > ep.una) arm_rto(ep);
  }

  void arm_rto(TcpEndpoint& ep) {
    const std::size_t idx = static_cast<std::size_t>(&ep - tcp_.data());
    ep.rto_timer = sim_.schedule(sim_.now() + Duration::seconds(ep.state.rto), EventKind::Timer,
                                 [this, idx] { tcp_timeout(tcp_[idx]); });
  }

  void tcp_timeout(TcpEndpoint& ep) {
    ep.rto_timer.reset();
    if (ep.nxt == ep.una) return;
    if (sim_.tracing()) sim_.note("rto flow=" + std::to_string(ep.node.value) + " seq=" + std::to_string(ep.una));
    traffic::legit_on_timeout(ep.state);
    ep.nxt = ep.una;
    tcp_try_send(ep);
  }

  void tcp_receive(TcpEndpoint& ep, std::uint64_t seq) {
    if (seq == ep.expected) {
      ++ep.expected;
      while (ep.out_of_order.erase(ep.expected) > 0) ++ep.expected;
    } else if (seq > ep.expected) {
      ep.out_of_order.insert(seq);
    }
    const std::uint64_t ack = ep.expected;
    const std::size_t idx = static_cast<std::size_t>(&ep - tcp_.data());
    sim_.schedule(sim_.now() + Duration::seconds(cfg_.network.wired_delay_s), EventKind::Traffic,
                  [this, idx, ack] { tcp_ack(tcp_[idx], ack); });
  }

  void tcp_ack(TcpEndpoint& ep, std::uint64_t ack) {
    if (ack <= ep.una) return;
    std::optional<double> sample;
    if (auto it = ep.info.find(ack - 1); it != ep.info.end() && !it->second.retransmitted) {
      sample = (sim_.now() - it->second.sent_at).seconds();
    }
    traffic::legit_on_ack(ep.state, sample);
    for (std::uint64_t s = ep.una; s < ack; ++s) ep.info.erase(s);
    ep.una = ack;
    ep.nxt = std::max(ep.nxt, ep.una);
    if (ep.rto_timer) {
      sim_.cancel(*ep.rto_timer);
      ep.rto_timer.reset();
    }
    tcp_try_send(ep);
  }

  // Attack traffic

  void attacker_emit(Attacker& a) {
    const double t = a.next_emit_s;
    note_sent(a.flow, a.spec.packet_bits);
    wlan_.enqueue(a.node, mac::Packet{static_cast<std::uint32_t>(a.flow), a.seq++, a.spec.packet_bits, sim_.now()});
    const auto next = traffic::next_burst_time(a.spec, t + 1.0 / a.spec.burst_rate_pps);
    if (next && *next < cfg_.duration_s) {
      a.next_emit_s = *next;
      const std::size_t idx = static_cast<std::size_t>(&a - attackers_.data());
      sim_.schedule(std::max(sim_.now(), SimTime::seconds(*next)), EventKind::Traffic,
                    [this, idx] { attacker_emit(attackers_[idx]); });
    }
  }

  // Access point and wired side

  void ap_receive(NodeId src, const mac::Packet& p) {
    if (spectral_) spectral_->record_arrival(src, sim_.now());
    if (blocklist_.contains(src)) {
      note_dropped(p.flow, p.bits, &DropBreakdown::filtered);
      return;
    }
    if (egress_.size() >= cfg_.network.ap_buffer_pkts) {
      note_dropped(p.flow, p.bits, &DropBreakdown::ap_buffer);
      return;
    }
    egress_.push_back(Queued{p.flow, p.seq, p.bits});
    if (!backhaul_busy_) start_backhaul();
  }

  void start_backhaul() {
    backhaul_busy_ = true;
    const Queued head = egress_.front();
    const Duration tx = Duration::seconds(head.bits / cfg_.network.backhaul_bps);
    sim_.schedule(sim_.now() + tx, EventKind::Traffic, [this] {
      const Queued q = egress_.front();
      egress_.pop_front();
      ++wired_pkts_[q.flow];
      wired_bits_[q.flow] += q.bits;
      sim_.schedule(sim_.now() + Duration::seconds(cfg_.network.wired_delay_s), EventKind::Traffic,
                    [this, q] { server_receive(q); });
      if (egress_.empty()) {
        backhaul_busy_ = false;
      } else {
        start_backhaul();
      }
    });
  }

  void server_receive(const Queued& q) {
    --wired_pkts_[q.flow];
    wired_bits_[q.flow] -= q.bits;
    note_delivered(q.flow, q.bits);
    if (result_.stats.flows[q.flow].cls == FlowClass::Legit) tcp_receive(tcp_[q.flow], q.seq);
  }

  // Passive server

  void on_tap(const mac::Frame& f) {
    switch (f.kind) {
      case mac::FrameKind::Rts:
        ++tap_count_[f.src];
        tap_stamps_[f.src] = tap_stamps_[f.src] | f.cb;
        break;
      case mac::FrameKind::Cts:
        ++tap_count_[f.dst];
        break;
      case mac::FrameKind::Data:
        tap_stamps_[f.src] = tap_stamps_[f.src] | f.cb;
        break;
      case mac::FrameKind::Ack:
        break;
    }
  }

  bool is_attacker(NodeId n) const { return result_.stats.flows[flow_of(n)].cls == FlowClass::Attack; }

  void on_interval(std::uint32_t k) {
    const auto& th = cfg_.mlda.thresholds;
    std::map<NodeId, CongestionBits> findings;
    for (const auto& rec : result_.stats.flows) {
      const NodeId n = rec.node;
      const mlda::IntervalCounters local = wlan_.interval_rollover(n);
      const CongestionBits own = th ? mlda::compute_cb(local, *th) : CongestionBits{};
      stamps_[n] = (cfg_.mlda.lying_attacker && is_attacker(n)) ? CongestionBits{} : own;

      const std::uint32_t count = tap_count_[n];
      const CongestionBits seen = tap_stamps_[n];
      CongestionBits cb;
      if (th) {
        const bool c1 = cfg_.mlda.rts_count_source == RtsCountSource::Server ? count > th->rc_th : seen.c1();
        cb = CongestionBits(c1, seen.c2(), seen.c3());
      }
      findings.emplace(n, cb);
      if (opts_.record_history) {
        result_.history.push_back(IntervalSample{k, now_s(), n, local, count, cb});
      }
    }
    tap_count_.clear();
    tap_stamps_.clear();

    if (cfg_.defense != Defense::Mlda) return;
    auto outcome = mlda::monitor_interval(monitor_, findings, cfg_.mlda.escalation);
    for (const auto& act : outcome.actions) {
      if (act.kind == mlda::Action::Kind::TransmitCb) {
        ++result_.cb_notifications[act.node];
      } else {
        block(act.node, Defense::Mlda);
      }
    }
    for (auto& r : outcome.records) result_.detections.push_back(r);
  }

  void on_spectral_window() {
    auto verdicts = spectral_->close_window_if_due(sim_.now());
    for (auto& v : verdicts) {
      if (cfg_.defense == Defense::Shrew && v.verdict == shrew::Verdict::Attack) block(v.flow, Defense::Shrew);
      result_.spectra.push_back(std::move(v));
    }
  }

  void block(NodeId n, Defense by) {
    if (!blocklist_.insert(n).second) return;
    if (sim_.tracing()) sim_.note("block node=" + std::to_string(n.value) + " by=" + std::string(to_string(by)));
    result_.blocks.push_back(BlockEvent{n, now_s(), by});
  }

  void finish() {
    for (auto& rec : result_.stats.flows) {
      for (const auto& p : wlan_.state(rec.node).queue) {
        ++rec.packets_in_flight;
        rec.bits_in_flight += p.bits;
      }
    }
    for (const auto& q : egress_) {
      ++result_.stats.flows[q.flow].packets_in_flight;
      result_.stats.flows[q.flow].bits_in_flight += q.bits;
    }
    for (std::size_t f = 0; f < result_.stats.flows.size(); ++f) {
      result_.stats.flows[f].packets_in_flight += wired_pkts_[f];
      result_.stats.flows[f].bits_in_flight += wired_bits_[f];
    }
    result_.events = sim_.dispatched();
    result_.mac_attempts = wlan_.attempts();
    result_.mac_collisions = wlan_.collisions();
  }

  const RunConfig& cfg_;
  RunOptions opts_;
  RandomSource root_;
  Simulator sim_;
  mac::Wlan wlan_;
  RunResult result_;

  std::vector<TcpEndpoint> tcp_;
  std::vector<Attacker> attackers_;
  std::deque<Queued> egress_;
  bool backhaul_busy_ = false;
  std::vector<std::uint64_t> wired_pkts_;
  std::vector<std::uint64_t> wired_bits_;

  std::set<NodeId> blocklist_;
  mlda::MonitorState monitor_;
  std::map<NodeId, std::uint32_t> tap_count_;
  std::map<NodeId, CongestionBits> tap_stamps_;
  std::map<NodeId, CongestionBits> stamps_;
  std::optional<shrew::SpectralFilter> spectral_;
};

}  // namespace

RunResult simulate(const RunConfig& config, const RunOptions& options) {
  config.validate();
  Scenario scenario(config, options);
  return scenario.run();
}

}  // namespace roqsim

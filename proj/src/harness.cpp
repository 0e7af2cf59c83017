// SPDX-License-Identifier: Apache-2.0
#include "roqsim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

namespace roqsim::harness {

RunMetrics summarize(const RunConfig& config, const RunResult& result) {
  const double window = config.duration_s - config.warmup_s;
  const FlowCounters legit = result.stats.measured(FlowClass::Legit);
  const FlowCounters attack = result.stats.measured(FlowClass::Attack);
  RunMetrics m;
  m.legit_bw_bps = received_bandwidth(legit, window);
  const PacketLoss loss = packet_loss(legit);
  m.legit_loss_pkts = loss.packets;
  m.legit_loss_ratio = loss.ratio;
  m.attack_bw_bps = received_bandwidth(attack, window);
  m.blocked_nodes = static_cast<std::uint32_t>(result.blocks.size());
  for (const auto& b : result.blocks) {
    if (std::find(result.legit_nodes.begin(), result.legit_nodes.end(), b.node) != result.legit_nodes.end()) {
      ++m.false_blocks;
    }
  }
  m.conserved = result.stats.conserved();
  return m;
}

mlda::Thresholds thresholds_from_means(const CounterMeans& means, double factor, double re_floor,
                                       double interval_s, Duration min_busy) {
  mlda::Thresholds th;
  th.rc_th = std::max(factor * means.rts_cts, 1.0);
  th.se_th_s = std::max(factor * means.busy_stop_s, min_busy.seconds());
  th.re_th = std::max(factor * means.retransmissions, re_floor);
  th.interval_s = interval_s;
  return th;
}

mlda::Thresholds calibrate_thresholds(const RunConfig& base) {
  if (base.attack.enabled()) throw ConfigError("calibration requires an attack-free config (attack.count = 0)");
  RunConfig cfg = base;
  cfg.defense = Defense::None;
  RunOptions opts;
  opts.record_history = true;
  const RunResult result = simulate(cfg, opts);

  struct Acc {
    double rts = 0, busy = 0, retx = 0;
    std::size_t n = 0;
  };
  std::map<NodeId, Acc> per_node;
  for (const auto& s : result.history) {
    if (s.end_s - cfg.mlda.interval_s < cfg.warmup_s - 1e-9) continue;
    Acc& a = per_node[s.node];
    a.rts += cfg.mlda.rts_count_source == RtsCountSource::Server ? s.server_rts_cts : s.local.rts_cts_count;
    a.busy += s.local.busy_stop_time.seconds();
    a.retx += s.local.retransmissions;
    ++a.n;
  }
  CounterMeans worst;
  for (const auto& [node, a] : per_node) {
    if (a.n == 0) continue;
    const double n = static_cast<double>(a.n);
    worst.rts_cts = std::max(worst.rts_cts, a.rts / n);
    worst.busy_stop_s = std::max(worst.busy_stop_s, a.busy / n);
    worst.retransmissions = std::max(worst.retransmissions, a.retx / n);
  }
  return thresholds_from_means(worst, cfg.mlda.calibration_factor, cfg.mlda.re_floor, cfg.mlda.interval_s,
                               cfg.phy.slot);
}

RunConfig with_thresholds(RunConfig config) {
  if (config.mlda.thresholds) return config;
  RunConfig base = config;
  base.attack.count = 0;
  config.mlda.thresholds = calibrate_thresholds(base);
  return config;
}

std::string_view to_string(Axis axis) { return axis == Axis::Attackers ? "attackers" : "period"; }

RunConfig apply_axis(RunConfig config, Axis axis, double value) {
  if (axis == Axis::Attackers) {
    if (value < 0) throw ConfigError("attacker count must be >= 0");
    config.attack.count = static_cast<std::uint32_t>(std::llround(value));
  } else {
    if (value < 0) throw ConfigError("attack period must be >= 0");
    config.attack.period_s = value;
    if (value == 0) config.attack.count = 0;
  }
  return config;
}

std::vector<SweepRow> sweep(const RunConfig& base, Axis axis, const std::vector<double>& values,
                            const std::vector<std::uint64_t>& seeds, unsigned threads) {
  if (values.empty()) throw ConfigError("sweep needs at least one axis value");
  if (seeds.empty()) throw ConfigError("sweep needs at least one seed");
  const RunConfig calibrated = with_thresholds(base);

  std::vector<SweepRow> rows;
  std::vector<RunConfig> configs;
  for (double v : values) {
    for (Defense d : {Defense::Mlda, Defense::Shrew}) {
      for (std::uint64_t seed : seeds) {
        RunConfig c = apply_axis(calibrated, axis, v);
        c.defense = d;
        c.seed = seed;
        c.validate();
        configs.push_back(std::move(c));
        rows.push_back(SweepRow{axis, v, d, seed, {}});
      }
    }
  }

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(configs.size()));
  std::atomic<std::size_t> next{0};
  std::mutex failure_mutex;
  std::exception_ptr failure;
  std::size_t failed_index = 0;
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < configs.size(); i = next++) {
          try {
            rows[i].metrics = summarize(configs[i], simulate(configs[i]));
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure || i < failed_index) {
              failure = std::current_exception();
              failed_index = i;
            }
            next = configs.size();
          }
        }
      });
    }
  }
  if (failure) {
    std::string what = "unknown error";
    try {
      std::rethrow_exception(failure);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    throw RunError("sweep run failed: " + what + "\nconfig:\n" + to_json(configs[failed_index]));
  }
  return rows;
}

std::vector<SweepSummaryRow> summarize_sweep(const std::vector<SweepRow>& rows) {
  std::vector<SweepSummaryRow> out;
  for (const auto& r : rows) {
    auto it = std::find_if(out.begin(), out.end(), [&](const SweepSummaryRow& s) {
      return s.axis == r.axis && s.value == r.value && s.defense == r.defense;
    });
    const double bw = r.metrics.legit_bw_bps;
    const double loss = static_cast<double>(r.metrics.legit_loss_pkts);
    if (it == out.end()) {
      out.push_back(SweepSummaryRow{r.axis, r.value, r.defense, 1, bw, bw, bw, loss, loss, loss});
      continue;
    }
    ++it->runs;
    it->bw_mean += bw;
    it->bw_min = std::min(it->bw_min, bw);
    it->bw_max = std::max(it->bw_max, bw);
    it->loss_mean += loss;
    it->loss_min = std::min(it->loss_min, loss);
    it->loss_max = std::max(it->loss_max, loss);
  }
  for (auto& s : out) {
    s.bw_mean /= static_cast<double>(s.runs);
    s.loss_mean /= static_cast<double>(s.runs);
  }
  return out;
}

std::string to_csv_row(const SweepRow& row) {
  const RunMetrics& m = row.metrics;
  char buf[512];
  std::snprintf(buf, sizeof buf, "%s,%g,%s,%llu,%.3f,%llu,%.6f,%.3f,%u,%u", std::string(to_string(row.axis)).c_str(),
                row.value, std::string(to_string(row.defense)).c_str(), static_cast<unsigned long long>(row.seed),
                m.legit_bw_bps, static_cast<unsigned long long>(m.legit_loss_pkts), m.legit_loss_ratio,
                m.attack_bw_bps, m.blocked_nodes, m.false_blocks);
  return buf;
}

void write_results_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << kResultsHeader << '\n';
  for (const auto& r : rows) out << to_csv_row(r) << '\n';
}

void write_summary_csv(std::ostream& out, const std::vector<SweepSummaryRow>& rows) {
  out << kSummaryHeader << '\n';
  char buf[512];
  for (const auto& s : rows) {
    std::snprintf(buf, sizeof buf, "%s,%g,%s,%zu,%.3f,%.3f,%.3f,%.3f,%.3f,%.3f",
                  std::string(to_string(s.axis)).c_str(), s.value, std::string(to_string(s.defense)).c_str(), s.runs,
                  s.bw_mean, s.bw_min, s.bw_max, s.loss_mean, s.loss_min, s.loss_max);
    out << buf << '\n';
  }
}

void write_spectra_csv(std::ostream& out, const std::vector<shrew::SpectrumVerdict>& spectra, double bin_width_s) {
  out << "flow,bin,freq_hz,energy\n";
  char buf[128];
  for (const auto& v : spectra) {
    const double n = 2.0 * static_cast<double>(v.spectrum.size() - 1);
    for (std::size_t k = 0; k < v.spectrum.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%u,%zu,%.6f,%.9g", v.flow.value, k,
                    static_cast<double>(k) / (n * bin_width_s), v.spectrum[k]);
      out << buf << '\n';
    }
  }
}

}  // namespace roqsim::harness

// SPDX-License-Identifier: Apache-2.0
#include "roqsim/config.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include "json.hpp"

namespace roqsim {

using nlohmann::json;

std::string_view to_string(Defense d) {
  switch (d) {
    case Defense::None:
      return "none";
    case Defense::Mlda:
      return "mlda";
    case Defense::Shrew:
      return "shrew";
  }
  return "?";
}

std::optional<Defense> parse_defense(std::string_view text) {
  if (text == "none") return Defense::None;
  if (text == "mlda") return Defense::Mlda;
  if (text == "shrew") return Defense::Shrew;
  return std::nullopt;
}

namespace {

void require_keys(const json& obj, std::string_view where, std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) throw ConfigError(std::string(where) + ": expected an object");
  for (const auto& [key, _] : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) throw ConfigError(std::string(where) + ": unknown key \"" + key + "\"");
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out, std::string_view where) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string(where) + "." + key + ": wrong type");
  }
}

void read_us(const json& obj, const char* key, Duration& out, std::string_view where) {
  std::int64_t us = out.micros();
  read(obj, key, us, where);
  out = Duration::micros(us);
}

mlda::Escalation parse_escalation(const std::string& s) {
  if (s == "streak") return mlda::Escalation::Streak;
  if (s == "absolute") return mlda::Escalation::Absolute;
  throw ConfigError("mlda.escalation: expected \"streak\" or \"absolute\"");
}

RtsCountSource parse_source(const std::string& s) {
  if (s == "server") return RtsCountSource::Server;
  if (s == "stamped") return RtsCountSource::Stamped;
  throw ConfigError("mlda.rts_count_source: expected \"server\" or \"stamped\"");
}

}  // namespace

RunConfig parse_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  require_keys(doc, "config",
               {"duration_s", "warmup_s", "seed", "phy", "network", "legit", "attack", "defense", "mlda", "shrew",
                "sweep"});
  RunConfig c;
  read(doc, "duration_s", c.duration_s, "config");
  read(doc, "warmup_s", c.warmup_s, "config");
  read(doc, "seed", c.seed, "config");

  if (auto it = doc.find("phy"); it != doc.end()) {
    const json& p = *it;
    require_keys(p, "phy",
                 {"slot_us", "sifs_us", "difs_us", "plcp_us", "rate_bps", "cw_min", "cw_max", "retry_limit",
                  "rts_bytes", "cts_bytes", "ack_bytes", "header_bytes", "queue_limit"});
    read_us(p, "slot_us", c.phy.slot, "phy");
    read_us(p, "sifs_us", c.phy.sifs, "phy");
    read_us(p, "difs_us", c.phy.difs, "phy");
    read_us(p, "plcp_us", c.phy.plcp, "phy");
    read(p, "rate_bps", c.phy.rate_bps, "phy");
    read(p, "cw_min", c.phy.cw_min, "phy");
    read(p, "cw_max", c.phy.cw_max, "phy");
    read(p, "retry_limit", c.phy.retry_limit, "phy");
    read(p, "rts_bytes", c.phy.rts_bytes, "phy");
    read(p, "cts_bytes", c.phy.cts_bytes, "phy");
    read(p, "ack_bytes", c.phy.ack_bytes, "phy");
    read(p, "header_bytes", c.phy.header_bytes, "phy");
    read(p, "queue_limit", c.phy.queue_limit, "phy");
  }
  if (auto it = doc.find("network"); it != doc.end()) {
    require_keys(*it, "network", {"backhaul_bps", "ap_buffer_pkts", "wired_delay_s"});
    read(*it, "backhaul_bps", c.network.backhaul_bps, "network");
    read(*it, "ap_buffer_pkts", c.network.ap_buffer_pkts, "network");
    read(*it, "wired_delay_s", c.network.wired_delay_s, "network");
  }
  if (auto it = doc.find("legit"); it != doc.end()) {
    require_keys(*it, "legit", {"count", "packet_bytes", "rwnd_pkts", "start_s", "start_spread_s"});
    read(*it, "count", c.legit.count, "legit");
    read(*it, "packet_bytes", c.legit.packet_bytes, "legit");
    read(*it, "rwnd_pkts", c.legit.rwnd_pkts, "legit");
    read(*it, "start_s", c.legit.start_s, "legit");
    read(*it, "start_spread_s", c.legit.start_spread_s, "legit");
  }
  if (auto it = doc.find("attack"); it != doc.end()) {
    const json& a = *it;
    require_keys(a, "attack",
                 {"count", "period_s", "burst_s", "rate_pps", "packet_bytes", "start_s", "phase_s", "jitter_s"});
    read(a, "count", c.attack.count, "attack");
    read(a, "period_s", c.attack.period_s, "attack");
    read(a, "burst_s", c.attack.burst_s, "attack");
    read(a, "rate_pps", c.attack.rate_pps, "attack");
    read(a, "packet_bytes", c.attack.packet_bytes, "attack");
    read(a, "start_s", c.attack.start_s, "attack");
    read(a, "jitter_s", c.attack.jitter_s, "attack");
    if (auto ph = a.find("phase_s"); ph != a.end()) {
      if (ph->is_string() && ph->get<std::string>() == "random") {
        c.attack.phase_s.reset();
      } else if (ph->is_number()) {
        c.attack.phase_s = ph->get<double>();
      } else {
        throw ConfigError("attack.phase_s: expected a number or \"random\"");
      }
    }
  }
  if (auto it = doc.find("defense"); it != doc.end()) {
    if (!it->is_string()) throw ConfigError("defense: expected a string");
    auto d = parse_defense(it->get<std::string>());
    if (!d) throw ConfigError("defense: expected \"none\", \"mlda\" or \"shrew\"");
    c.defense = *d;
  }
  if (auto it = doc.find("mlda"); it != doc.end()) {
    const json& m = *it;
    require_keys(m, "mlda",
                 {"thresholds", "interval_s", "escalation", "lying_attacker", "rts_count_source",
                  "calibration_factor", "re_floor"});
    read(m, "interval_s", c.mlda.interval_s, "mlda");
    read(m, "lying_attacker", c.mlda.lying_attacker, "mlda");
    read(m, "calibration_factor", c.mlda.calibration_factor, "mlda");
    read(m, "re_floor", c.mlda.re_floor, "mlda");
    std::string s;
    if (m.contains("escalation")) {
      read(m, "escalation", s, "mlda");
      c.mlda.escalation = parse_escalation(s);
    }
    if (m.contains("rts_count_source")) {
      read(m, "rts_count_source", s, "mlda");
      c.mlda.rts_count_source = parse_source(s);
    }
    if (auto th = m.find("thresholds"); th != m.end() && !th->is_null()) {
      if (th->is_string() && th->get<std::string>() == "auto") {
        c.mlda.thresholds.reset();
      } else {
        require_keys(*th, "mlda.thresholds", {"rc_th", "se_th_s", "re_th"});
        mlda::Thresholds t;
        read(*th, "rc_th", t.rc_th, "mlda.thresholds");
        read(*th, "se_th_s", t.se_th_s, "mlda.thresholds");
        read(*th, "re_th", t.re_th, "mlda.thresholds");
        c.mlda.thresholds = t;
      }
    }
  }
  if (auto it = doc.find("shrew"); it != doc.end()) {
    require_keys(*it, "shrew", {"bin_s", "window_bins", "cutoff_hz", "threshold"});
    read(*it, "bin_s", c.shrew.bin_width_s, "shrew");
    read(*it, "window_bins", c.shrew.window_bins, "shrew");
    read(*it, "cutoff_hz", c.shrew.cutoff_hz, "shrew");
    read(*it, "threshold", c.shrew.threshold, "shrew");
  }
  if (auto it = doc.find("sweep"); it != doc.end()) {
    require_keys(*it, "sweep", {"seeds", "attackers", "periods"});
    read(*it, "seeds", c.sweep.seeds, "sweep");
    read(*it, "attackers", c.sweep.attackers, "sweep");
    read(*it, "periods", c.sweep.periods, "sweep");
  }
  if (c.mlda.thresholds) c.mlda.thresholds->interval_s = c.mlda.interval_s;
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_json(const RunConfig& c) {
  json doc;
  doc["duration_s"] = c.duration_s;
  doc["warmup_s"] = c.warmup_s;
  doc["seed"] = c.seed;
  doc["phy"] = {{"slot_us", c.phy.slot.micros()},
                {"sifs_us", c.phy.sifs.micros()},
                {"difs_us", c.phy.difs.micros()},
                {"plcp_us", c.phy.plcp.micros()},
                {"rate_bps", c.phy.rate_bps},
                {"cw_min", c.phy.cw_min},
                {"cw_max", c.phy.cw_max},
                {"retry_limit", c.phy.retry_limit},
                {"rts_bytes", c.phy.rts_bytes},
                {"cts_bytes", c.phy.cts_bytes},
                {"ack_bytes", c.phy.ack_bytes},
                {"header_bytes", c.phy.header_bytes},
                {"queue_limit", c.phy.queue_limit}};
  doc["network"] = {{"backhaul_bps", c.network.backhaul_bps},
                    {"ap_buffer_pkts", c.network.ap_buffer_pkts},
                    {"wired_delay_s", c.network.wired_delay_s}};
  doc["legit"] = {{"count", c.legit.count},
                  {"packet_bytes", c.legit.packet_bytes},
                  {"rwnd_pkts", c.legit.rwnd_pkts},
                  {"start_s", c.legit.start_s},
                  {"start_spread_s", c.legit.start_spread_s}};
  doc["attack"] = {{"count", c.attack.count},
                   {"period_s", c.attack.period_s},
                   {"burst_s", c.attack.burst_s},
                   {"rate_pps", c.attack.rate_pps},
                   {"packet_bytes", c.attack.packet_bytes},
                   {"start_s", c.attack.start_s},
                   {"jitter_s", c.attack.jitter_s}};
  if (c.attack.phase_s) {
    doc["attack"]["phase_s"] = *c.attack.phase_s;
  } else {
    doc["attack"]["phase_s"] = "random";
  }
  doc["defense"] = std::string(to_string(c.defense));
  json m = {{"interval_s", c.mlda.interval_s},
            {"escalation", c.mlda.escalation == mlda::Escalation::Streak ? "streak" : "absolute"},
            {"lying_attacker", c.mlda.lying_attacker},
            {"rts_count_source", c.mlda.rts_count_source == RtsCountSource::Server ? "server" : "stamped"},
            {"calibration_factor", c.mlda.calibration_factor},
            {"re_floor", c.mlda.re_floor}};
  if (c.mlda.thresholds) {
    m["thresholds"] = {{"rc_th", c.mlda.thresholds->rc_th},
                       {"se_th_s", c.mlda.thresholds->se_th_s},
                       {"re_th", c.mlda.thresholds->re_th}};
  } else {
    m["thresholds"] = "auto";
  }
  doc["mlda"] = m;
  doc["shrew"] = {{"bin_s", c.shrew.bin_width_s},
                  {"window_bins", c.shrew.window_bins},
                  {"cutoff_hz", c.shrew.cutoff_hz},
                  {"threshold", c.shrew.threshold}};
  doc["sweep"] = {{"seeds", c.sweep.seeds}, {"attackers", c.sweep.attackers}, {"periods", c.sweep.periods}};
  return doc.dump(2);
}

void RunConfig::validate() const {
  if (!(duration_s > 0)) throw ConfigError("duration_s must be > 0");
  if (warmup_s < 0 || warmup_s >= duration_s) throw ConfigError("warmup_s must lie in [0, duration_s)");
  try {
    phy.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("phy: ") + e.what());
  }
  if (!(network.backhaul_bps > 0)) throw ConfigError("network.backhaul_bps must be > 0");
  if (network.ap_buffer_pkts == 0) throw ConfigError("network.ap_buffer_pkts must be >= 1");
  if (network.wired_delay_s < 0) throw ConfigError("network.wired_delay_s must be >= 0");
  if (legit.count == 0) throw ConfigError("at least one legitimate flow is required");
  if (legit.packet_bytes == 0 || legit.rwnd_pkts == 0) throw ConfigError("legit packet size and window must be > 0");
  if (legit.start_s < 0 || legit.start_spread_s < 0) throw ConfigError("legit start times must be >= 0");
  if (attack.period_s < 0) throw ConfigError("attack.period_s must be >= 0");
  if (attack.count > 0 && attack.period_s > 0) {
    if (attack.burst_s < 0 || attack.burst_s > attack.period_s) {
      throw ConfigError("attack.burst_s must lie in [0, attack.period_s]");
    }
    if (!(attack.rate_pps > 0)) throw ConfigError("attack.rate_pps must be > 0");
    if (attack.packet_bytes == 0) throw ConfigError("attack.packet_bytes must be > 0");
    if (attack.start_s < 0) throw ConfigError("attack.start_s must be >= 0");
    if (attack.phase_s && (*attack.phase_s < 0 || *attack.phase_s >= attack.period_s)) {
      throw ConfigError("attack.phase_s must lie in [0, attack.period_s)");
    }
    if (attack.jitter_s < 0 || 2 * attack.jitter_s > attack.period_s - attack.burst_s) {
      throw ConfigError("attack.jitter_s must satisfy 0 <= 2*jitter <= period - burst");
    }
  }
  if (!(mlda.interval_s > 0)) throw ConfigError("mlda.interval_s must be > 0");
  if (!(mlda.calibration_factor > 0) || mlda.re_floor < 0) throw ConfigError("mlda calibration parameters invalid");
  if (mlda.thresholds) {
    try {
      mlda.thresholds->validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("mlda.thresholds: ") + e.what());
    }
  }
  if (shrew.window_bins == 0 || (shrew.window_bins & (shrew.window_bins - 1)) != 0) {
    throw ConfigError("shrew.window_bins must be a power of two");
  }
  if (!(shrew.bin_width_s > 0)) throw ConfigError("shrew.bin_s must be > 0");
  if (!(shrew.cutoff_hz > 0) || shrew.cutoff_hz > 1.0 / (2.0 * shrew.bin_width_s)) {
    throw ConfigError("shrew.cutoff_hz must lie in (0, Nyquist]");
  }
  if (shrew.threshold < 0 || shrew.threshold > 1) throw ConfigError("shrew.threshold must lie in [0, 1]");
  if (sweep.seeds.empty()) throw ConfigError("sweep.seeds must not be empty");
}

}  // namespace roqsim

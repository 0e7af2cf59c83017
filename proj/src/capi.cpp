// SPDX-License-Identifier: Apache-2.0
#include "roqsim/roqsim.h"

#include <cstring>
#include <fstream>
#include <memory>
#include <string>

#include "roqsim/harness.hpp"

struct roqsim_config {
  roqsim::RunConfig config;
};

struct roqsim_result {
  roqsim::RunConfig config;
  roqsim::RunResult result;
  roqsim::harness::RunMetrics metrics;
};

namespace {

thread_local std::string g_last_error;

roqsim_status fail(roqsim_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <typename F>
roqsim_status guarded(F&& body) {
  try {
    g_last_error.clear();
    body();
    return ROQSIM_OK;
  } catch (const roqsim::ConfigError& e) {
    return fail(ROQSIM_ERR_CONFIG, e.what());
  } catch (const IoError& e) {
    return fail(ROQSIM_ERR_IO, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(ROQSIM_ERR_CONFIG, e.what());
  } catch (const std::bad_alloc&) {
    return fail(ROQSIM_ERR_RUN, "out of memory");
  } catch (const std::exception& e) {
    return fail(ROQSIM_ERR_RUN, e.what());
  } catch (...) {
    return fail(ROQSIM_ERR_RUN, "unknown failure");
  }
}

std::ofstream open_output(const char* path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(std::string("cannot open ") + path + " for writing");
  return out;
}

void finish_output(std::ofstream& out, const char* path) {
  out.flush();
  if (!out) throw IoError(std::string("write to ") + path + " failed");
}

}  // namespace

extern "C" {

const char* roqsim_last_error(void) { return g_last_error.c_str(); }

const char* roqsim_version(void) { return "1.0.0"; }

roqsim_status roqsim_config_from_file(const char* path, roqsim_config** out) {
  if (path == nullptr || out == nullptr) return fail(ROQSIM_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] { *out = new roqsim_config{roqsim::load_config(path)}; });
}

roqsim_status roqsim_config_from_json(const char* json, roqsim_config** out) {
  if (json == nullptr || out == nullptr) return fail(ROQSIM_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] { *out = new roqsim_config{roqsim::parse_config(json)}; });
}

void roqsim_config_free(roqsim_config* config) { delete config; }

roqsim_status roqsim_config_set_seed(roqsim_config* config, uint64_t seed) {
  if (config == nullptr) return fail(ROQSIM_ERR_INVALID_ARGUMENT, "null config");
  config->config.seed = seed;
  return ROQSIM_OK;
}

roqsim_status roqsim_config_set_defense(roqsim_config* config, roqsim_defense defense) {
  if (config == nullptr) return fail(ROQSIM_ERR_INVALID_ARGUMENT, "null config");
  switch (defense) {
    case ROQSIM_DEFENSE_NONE: config->config.defense = roqsim::Defense::None; break;
    case ROQSIM_DEFENSE_MLDA: config->config.defense = roqsim::Defense::Mlda; break;
    case ROQSIM_DEFENSE_SHREW: config->config.defense = roqsim::Defense::Shrew; break;
    default: return fail(ROQSIM_ERR_INVALID_ARGUMENT, "unknown defense");
  }
  return ROQSIM_OK;
}

roqsim_status roqsim_config_set_thresholds(roqsim_config* config, const roqsim_thresholds* th) {
  if (config == nullptr || th == nullptr) return fail(ROQSIM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    roqsim::mlda::Thresholds t{th->rc_th, th->se_th_s, th->re_th, config->config.mlda.interval_s};
    t.validate();
    config->config.mlda.thresholds = t;
  });
}

roqsim_status roqsim_config_to_json(const roqsim_config* config, char** out) {
  if (config == nullptr || out == nullptr) return fail(ROQSIM_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    const std::string text = roqsim::to_json(config->config);
    auto buf = std::make_unique<char[]>(text.size() + 1);
    std::memcpy(buf.get(), text.c_str(), text.size() + 1);
    *out = buf.release();
  });
}

void roqsim_string_free(char* text) { delete[] text; }

roqsim_status roqsim_run(const roqsim_config* config, const roqsim_run_options* options, roqsim_result** out) {
  if (config == nullptr || out == nullptr) return fail(ROQSIM_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  const roqsim_run_options none{nullptr, nullptr, nullptr};
  const roqsim_run_options& o = options != nullptr ? *options : none;
  return guarded([&] {
    auto res = std::make_unique<roqsim_result>();
    res->config = config->config;
    res->config.validate();
    if (res->config.defense == roqsim::Defense::Mlda) res->config = roqsim::harness::with_thresholds(res->config);

    std::ofstream trace;
    roqsim::RunOptions run_opts;
    if (o.trace_path != nullptr) {
      trace = open_output(o.trace_path);
      run_opts.trace = &trace;
    }
    run_opts.observe_spectra = o.spectra_path != nullptr;
    res->result = roqsim::simulate(res->config, run_opts);
    res->metrics = roqsim::harness::summarize(res->config, res->result);
    if (o.trace_path != nullptr) finish_output(trace, o.trace_path);

    if (o.spectra_path != nullptr) {
      std::ofstream spectra = open_output(o.spectra_path);
      roqsim::harness::write_spectra_csv(spectra, res->result.spectra, res->config.shrew.bin_width_s);
      finish_output(spectra, o.spectra_path);
    }
    if (o.detection_log_path != nullptr) {
      std::ofstream log = open_output(o.detection_log_path);
      log << roqsim::mlda::detection_log_header() << '\n';
      for (const auto& r : res->result.detections) log << roqsim::mlda::to_csv_row(r) << '\n';
      finish_output(log, o.detection_log_path);
    }
    *out = res.release();
  });
}

roqsim_status roqsim_result_metrics(const roqsim_result* result, roqsim_metrics* out) {
  if (result == nullptr || out == nullptr) return fail(ROQSIM_ERR_INVALID_ARGUMENT, "null argument");
  const auto& m = result->metrics;
  *out = roqsim_metrics{m.legit_bw_bps,  m.legit_loss_pkts, m.legit_loss_ratio,     m.attack_bw_bps,
                        m.blocked_nodes, m.false_blocks,    m.conserved ? 1 : 0, result->result.events};
  return ROQSIM_OK;
}

void roqsim_result_free(roqsim_result* result) { delete result; }

roqsim_status roqsim_calibrate(const roqsim_config* config, roqsim_thresholds* out) {
  if (config == nullptr || out == nullptr) return fail(ROQSIM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    config->config.validate();
    const auto th = roqsim::harness::calibrate_thresholds(config->config);
    *out = roqsim_thresholds{th.rc_th, th.se_th_s, th.re_th};
  });
}

roqsim_status roqsim_sweep(const roqsim_config* config, roqsim_axis axis, const char* out_csv,
                           const char* summary_csv) {
  if (config == nullptr || out_csv == nullptr) return fail(ROQSIM_ERR_INVALID_ARGUMENT, "null argument");
  if (axis != ROQSIM_AXIS_ATTACKERS && axis != ROQSIM_AXIS_PERIOD) {
    return fail(ROQSIM_ERR_INVALID_ARGUMENT, "unknown sweep axis");
  }
  return guarded([&] {
    const auto& cfg = config->config;
    cfg.validate();
    const bool by_attackers = axis == ROQSIM_AXIS_ATTACKERS;
    const auto rows = roqsim::harness::sweep(cfg, by_attackers ? roqsim::harness::Axis::Attackers
                                                               : roqsim::harness::Axis::Period,
                                             by_attackers ? cfg.sweep.attackers : cfg.sweep.periods, cfg.sweep.seeds);
    std::ofstream out = open_output(out_csv);
    roqsim::harness::write_results_csv(out, rows);
    finish_output(out, out_csv);
    if (summary_csv != nullptr) {
      std::ofstream summary = open_output(summary_csv);
      roqsim::harness::write_summary_csv(summary, roqsim::harness::summarize_sweep(rows));
      finish_output(summary, summary_csv);
    }
  });
}

}  // extern "C"

// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end. Talks to the simulator only through the C API.
#include <CLI11.hpp>

#include <cstdio>
#include <string>

#include "roqsim/roqsim.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRun = 2;

int exit_code(roqsim_status status) {
  switch (status) {
    case ROQSIM_OK: return kExitOk;
    case ROQSIM_ERR_CONFIG:
    case ROQSIM_ERR_INVALID_ARGUMENT: return kExitConfig;
    default: return kExitRun;
  }
}

int report(roqsim_status status) {
  if (status != ROQSIM_OK) std::fprintf(stderr, "roqsim: %s\n", roqsim_last_error());
  return exit_code(status);
}

struct ConfigGuard {
  roqsim_config* ptr = nullptr;
  ~ConfigGuard() { roqsim_config_free(ptr); }
};

int cmd_run(const std::string& config_path, const std::string& trace, const std::string& spectra,
            const std::string& detections) {
  ConfigGuard cfg;
  if (auto st = roqsim_config_from_file(config_path.c_str(), &cfg.ptr); st != ROQSIM_OK) return report(st);
  roqsim_run_options opts{trace.empty() ? nullptr : trace.c_str(), spectra.empty() ? nullptr : spectra.c_str(),
                          detections.empty() ? nullptr : detections.c_str()};
  roqsim_result* result = nullptr;
  if (auto st = roqsim_run(cfg.ptr, &opts, &result); st != ROQSIM_OK) return report(st);
  roqsim_metrics m{};
  roqsim_result_metrics(result, &m);
  roqsim_result_free(result);
  std::printf("legit_bw_bps=%.3f\nlegit_loss_pkts=%llu\nlegit_loss_ratio=%.6f\nattack_bw_bps=%.3f\n"
              "blocked_nodes=%u\nfalse_blocks=%u\nconserved=%s\nevents=%llu\n",
              m.legit_bw_bps, static_cast<unsigned long long>(m.legit_loss_pkts), m.legit_loss_ratio,
              m.attack_bw_bps, m.blocked_nodes, m.false_blocks, m.conserved ? "yes" : "no",
              static_cast<unsigned long long>(m.events));
  return kExitOk;
}

int cmd_sweep(const std::string& axis, const std::string& config_path, const std::string& out,
              const std::string& summary) {
  ConfigGuard cfg;
  if (auto st = roqsim_config_from_file(config_path.c_str(), &cfg.ptr); st != ROQSIM_OK) return report(st);
  const roqsim_axis ax = axis == "attackers" ? ROQSIM_AXIS_ATTACKERS : ROQSIM_AXIS_PERIOD;
  return report(roqsim_sweep(cfg.ptr, ax, out.c_str(), summary.empty() ? nullptr : summary.c_str()));
}

int cmd_calibrate(const std::string& config_path) {
  ConfigGuard cfg;
  if (auto st = roqsim_config_from_file(config_path.c_str(), &cfg.ptr); st != ROQSIM_OK) return report(st);
  roqsim_thresholds th{};
  if (auto st = roqsim_calibrate(cfg.ptr, &th); st != ROQSIM_OK) return report(st);
  std::printf("{\"rc_th\": %.6g, \"se_th_s\": %.6g, \"re_th\": %.6g}\n", th.rc_th, th.se_th_s, th.re_th);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete-event WLAN simulator for low-rate RoQ attacks and their defenses"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(roqsim_version()));

  std::string config, trace, spectra, detections, out, summary, axis;

  auto* run = app.add_subcommand("run", "Run one simulation and print its metrics");
  run->add_option("--config", config, "JSON run configuration")->required();
  run->add_option("--trace", trace, "Write the event trace (TSV) here");
  run->add_option("--dump-spectra", spectra, "Write per-flow power spectra (CSV) here");
  run->add_option("--detection-log", detections, "Write the MLDA detection log (CSV) here");

  auto* sw = app.add_subcommand("sweep", "Run a parameter sweep comparing MLDA and the spectral filter");
  sw->add_option("axis", axis, "Swept parameter")->required()->check(CLI::IsMember({"attackers", "period"}));
  sw->add_option("--config", config, "JSON base configuration")->required();
  sw->add_option("--out", out, "Per-run results CSV")->required();
  sw->add_option("--summary", summary, "Optional per-point summary CSV");

  auto* cal = app.add_subcommand("calibrate", "Derive MLDA thresholds from an attack-free run");
  cal->add_option("--config", config, "JSON configuration without attackers")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  if (run->parsed()) return cmd_run(config, trace, spectra, detections);
  if (sw->parsed()) return cmd_sweep(axis, config, out, summary);
  return cmd_calibrate(config);
}

/* SPDX-License-Identifier: Apache-2.0 */
/*
 * Stable C interface to the roqsim simulator.
 *
 * Objects are opaque and owned by the caller once returned; release them with
 * the matching *_free function. Every fallible call returns a roqsim_status and
 * leaves a human-readable message in roqsim_last_error() on the calling thread.
 */
#ifndef ROQSIM_ROQSIM_H
#define ROQSIM_ROQSIM_H

#include <stddef.h>
#include <stdint.h>

#if defined(ROQSIM_BUILDING)
#define ROQSIM_API __attribute__((visibility("default")))
#else
#define ROQSIM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum roqsim_status {
  ROQSIM_OK = 0,
  ROQSIM_ERR_CONFIG = 1,
  ROQSIM_ERR_RUN = 2,
  ROQSIM_ERR_INVALID_ARGUMENT = 3,
  ROQSIM_ERR_IO = 4
} roqsim_status;

typedef enum roqsim_defense {
  ROQSIM_DEFENSE_NONE = 0,
  ROQSIM_DEFENSE_MLDA = 1,
  ROQSIM_DEFENSE_SHREW = 2
} roqsim_defense;

typedef enum roqsim_axis { ROQSIM_AXIS_ATTACKERS = 0, ROQSIM_AXIS_PERIOD = 1 } roqsim_axis;

typedef struct roqsim_config roqsim_config;
typedef struct roqsim_result roqsim_result;

typedef struct roqsim_thresholds {
  double rc_th;
  double se_th_s;
  double re_th;
} roqsim_thresholds;

/* Optional output files for roqsim_run. NULL members are skipped. */
typedef struct roqsim_run_options {
  const char* trace_path;
  const char* spectra_path;
  const char* detection_log_path;
} roqsim_run_options;

typedef struct roqsim_metrics {
  double legit_bw_bps;
  uint64_t legit_loss_pkts;
  double legit_loss_ratio;
  double attack_bw_bps;
  uint32_t blocked_nodes;
  uint32_t false_blocks;
  int conserved;
  uint64_t events;
} roqsim_metrics;

/* Message for the last failed call on this thread; never NULL. */
ROQSIM_API const char* roqsim_last_error(void);
ROQSIM_API const char* roqsim_version(void);

ROQSIM_API roqsim_status roqsim_config_from_file(const char* path, roqsim_config** out);
ROQSIM_API roqsim_status roqsim_config_from_json(const char* json, roqsim_config** out);
ROQSIM_API void roqsim_config_free(roqsim_config* config);
ROQSIM_API roqsim_status roqsim_config_set_seed(roqsim_config* config, uint64_t seed);
ROQSIM_API roqsim_status roqsim_config_set_defense(roqsim_config* config, roqsim_defense defense);
ROQSIM_API roqsim_status roqsim_config_set_thresholds(roqsim_config* config, const roqsim_thresholds* th);
/* Canonical JSON of the effective config; free with roqsim_string_free. */
ROQSIM_API roqsim_status roqsim_config_to_json(const roqsim_config* config, char** out);
ROQSIM_API void roqsim_string_free(char* text);

/* Runs one simulation. Thresholds are calibrated first when MLDA is selected
 * and the config carries none. `options` may be NULL. */
ROQSIM_API roqsim_status roqsim_run(const roqsim_config* config, const roqsim_run_options* options,
                                    roqsim_result** out);
ROQSIM_API roqsim_status roqsim_result_metrics(const roqsim_result* result, roqsim_metrics* out);
ROQSIM_API void roqsim_result_free(roqsim_result* result);

/* Derives thresholds from an attack-free run of `config`. */
ROQSIM_API roqsim_status roqsim_calibrate(const roqsim_config* config, roqsim_thresholds* out);

/* Runs the configured sweep and writes the per-run results CSV. When
 * summary_csv is non-NULL a per-point summary is written there too. */
ROQSIM_API roqsim_status roqsim_sweep(const roqsim_config* config, roqsim_axis axis, const char* out_csv,
                                      const char* summary_csv);

#ifdef __cplusplus
}
#endif

#endif

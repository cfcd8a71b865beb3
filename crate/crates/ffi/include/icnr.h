#ifndef ICNR_H
#define ICNR_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stddef.h>
#include <stdint.h>

typedef enum IcnrFormat {
  ICNR_FORMAT_CSV = 0,
  ICNR_FORMAT_JSON = 1,
  ICNR_FORMAT_SVG = 2,
  ICNR_FORMAT_ALL = 3,
} IcnrFormat;

typedef enum IcnrLevel {
  ICNR_LEVEL_TRADITIONAL = 0,
  ICNR_LEVEL_FUNCTION_LEVEL = 1,
  ICNR_LEVEL_SIGNAL_LEVEL = 2,
} IcnrLevel;

typedef enum IcnrMetric {
  ICNR_METRIC_OUTAGE_PROBABILITY = 0,
  ICNR_METRIC_ERGODIC_CAPACITY = 1,
  ICNR_METRIC_POSITIONING_ERROR = 2,
  ICNR_METRIC_TIMING_ERROR = 3,
  ICNR_METRIC_NAV_AVAILABILITY = 4,
  ICNR_METRIC_RANGE_RESOLUTION = 5,
  ICNR_METRIC_AOI = 6,
} IcnrMetric;

typedef enum IcnrStatus {
  ICNR_STATUS_OK = 0,
  ICNR_STATUS_NULL_POINTER = 1,
  ICNR_STATUS_INVALID_ARGUMENT = 2,
  ICNR_STATUS_VALIDATION = 3,
  ICNR_STATUS_PARSE = 4,
  ICNR_STATUS_IO = 5,
  ICNR_STATUS_NUMERICAL = 6,
  ICNR_STATUS_NOT_FOUND = 7,
  ICNR_STATUS_PANIC = 8,
} IcnrStatus;

/**
 * Scenario parameters.
 */
typedef struct IcnrConfig IcnrConfig;

/**
 * Summarized results of an experiment.
 */
typedef struct IcnrReport IcnrReport;

/**
 * One metric of one level. Fields are NaN when the metric had no samples.
 */
typedef struct IcnrMetricSummary {
  uint64_t samples;
  double mean;
  double std_error;
  double ci_low;
  double ci_high;
} IcnrMetricSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Description of the last failure on this thread, or null if none. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *icnr_last_error_message(void);

/**
 * Default scenario. Never null.
 */
struct IcnrConfig *icnr_config_default(void);

/**
 * Parse a configuration file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` writable.
 */
enum IcnrStatus icnr_config_from_file(const char *path, struct IcnrConfig **out);

/**
 * Parse configuration text in the file format.
 *
 * # Safety
 * `source` must be a NUL-terminated string and `out` writable.
 */
enum IcnrStatus icnr_config_from_str(const char *source, struct IcnrConfig **out);

/**
 * Set one key as it would be written in a configuration file, units
 * included. The handle is unchanged on failure.
 *
 * # Safety
 * `config` must come from this library; `key` and `value` must be
 * NUL-terminated strings.
 */
enum IcnrStatus icnr_config_set(struct IcnrConfig *config, const char *key, const char *value);

/**
 * SHA-256 fingerprint of the configuration as 64 hex digits. Release with
 * [`icnr_string_free`].
 *
 * # Safety
 * `config` must come from this library and `out` be writable.
 */
enum IcnrStatus icnr_config_fingerprint(const struct IcnrConfig *config, char **out);

/**
 * # Safety
 * `config` must be null or come from this library, and not be used after.
 */
void icnr_config_free(struct IcnrConfig *config);

/**
 * Run `trials` paired trials of the listed levels (`IcnrLevel` values).
 * Trials run on the global thread pool; results do not depend on its size.
 *
 * # Safety
 * `config` must come from this library, `levels` must point to
 * `level_count` values and `out` be writable.
 */
enum IcnrStatus icnr_run_experiment(const struct IcnrConfig *config,
                                    const uint32_t *levels,
                                    size_t level_count,
                                    uint64_t trials,
                                    uint64_t master_seed,
                                    struct IcnrReport **out);

/**
 * Number of trials behind the report.
 *
 * # Safety
 * `report` must come from this library.
 */
uint64_t icnr_report_trials(const struct IcnrReport *report);

/**
 * Summary of `metric` (an `IcnrMetric`) at `level` (an `IcnrLevel`).
 * Returns `ICNR_STATUS_NOT_FOUND` when the level was not run.
 *
 * # Safety
 * `report` must come from this library and `out` be writable.
 */
enum IcnrStatus icnr_report_metric(const struct IcnrReport *report,
                                   uint32_t level_code,
                                   uint32_t metric_code,
                                   struct IcnrMetricSummary *out);

/**
 * Write the report files selected by `format_code` (an `IcnrFormat`) into
 * `out_dir`, creating it if needed.
 *
 * # Safety
 * `report` must come from this library; `out_dir` must be a NUL-terminated
 * string.
 */
enum IcnrStatus icnr_report_write(const struct IcnrReport *report,
                                  uint32_t format_code,
                                  const char *out_dir);

/**
 * The CSV report as a string. Release with [`icnr_string_free`].
 *
 * # Safety
 * `report` must come from this library and `out` be writable.
 */
enum IcnrStatus icnr_report_csv(const struct IcnrReport *report, char **out);

/**
 * The JSON report as a string. Release with [`icnr_string_free`].
 *
 * # Safety
 * `report` must come from this library and `out` be writable.
 */
enum IcnrStatus icnr_report_json(const struct IcnrReport *report, char **out);

/**
 * # Safety
 * `report` must be null or come from this library, and not be used after.
 */
void icnr_report_free(struct IcnrReport *report);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void icnr_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ICNR_H */

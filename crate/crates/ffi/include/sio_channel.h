#ifndef SIO_CHANNEL_H
#define SIO_CHANNEL_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SioFormat {
  SIO_FORMAT_CSV = 0,
  SIO_FORMAT_JSON = 1,
} SioFormat;

/**
 * Status codes. The first three match the command-line exit codes.
 */
typedef enum SioStatus {
  SIO_STATUS_OK = 0,
  /**
   * The run completed and at least one check failed.
   */
  SIO_STATUS_CHECKS_FAILED = 1,
  /**
   * Invalid configuration, unknown suite id, or an unreadable file.
   */
  SIO_STATUS_USAGE = 2,
  SIO_STATUS_NULL_ARGUMENT = 3,
  SIO_STATUS_INVALID_UTF8 = 4,
  /**
   * Numerical or archive failure during a run.
   */
  SIO_STATUS_RUNTIME = 5,
  SIO_STATUS_PANIC = 6,
} SioStatus;

/**
 * A validated experiment: config, channel, grids and probes.
 */
typedef struct SioExperiment SioExperiment;

/**
 * A verification report.
 */
typedef struct SioReport SioReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null. Owned by the library.
 */
const char *sio_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *sio_version(void);

/**
 * Parses and validates a TOML experiment config.
 *
 * # Safety
 * `toml` must be a NUL-terminated string and `out` a valid pointer.
 */
enum SioStatus sio_experiment_from_toml(const char *toml, struct SioExperiment **out);

/**
 * Reads a TOML experiment config from a file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum SioStatus sio_experiment_load(const char *path, struct SioExperiment **out);

/**
 * # Safety
 * `exp` must come from this library and not be used afterwards. Null is ignored.
 */
void sio_experiment_free(struct SioExperiment *exp);

/**
 * Realizations per statistical suite.
 *
 * # Safety
 * `exp` must be a live experiment handle.
 */
size_t sio_experiment_n_reps(const struct SioExperiment *exp);

/**
 * Writes the realization archive to `path`. `workers = 0` reads `SIO_WORKERS`.
 *
 * # Safety
 * `exp` must be a live experiment handle and `path` a NUL-terminated string.
 */
enum SioStatus sio_simulate(const struct SioExperiment *exp, const char *path, size_t workers);

/**
 * Runs suite `suite` (or `"all"` configured suites) and stores the report in `out`.
 *
 * Returns [`SioStatus::ChecksFailed`] with a valid report when some check failed.
 *
 * # Safety
 * `exp` must be a live experiment handle, `suite` a NUL-terminated string and `out` a valid
 * pointer.
 */
enum SioStatus sio_verify(const struct SioExperiment *exp,
                          const char *suite,
                          size_t workers,
                          struct SioReport **out);

/**
 * # Safety
 * `report` must come from this library and not be used afterwards. Null is ignored.
 */
void sio_report_free(struct SioReport *report);

/**
 * Row tallies of a report. Any of the out pointers may be null.
 *
 * # Safety
 * `report` must be a live report handle; non-null out pointers must be valid.
 */
enum SioStatus sio_report_summary(const struct SioReport *report,
                                  size_t *total,
                                  size_t *passed,
                                  size_t *failed);

/**
 * Renders the report; release `*out` with [`sio_string_free`].
 *
 * # Safety
 * `report` must be a live report handle and `out` a valid pointer.
 */
enum SioStatus sio_report_render(const struct SioReport *report, enum SioFormat format, char **out);

/**
 * # Safety
 * `s` must be a string returned by this library, not yet freed. Null is ignored.
 */
void sio_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SIO_CHANNEL_H */

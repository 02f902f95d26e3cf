#ifndef CRISIS_SIM_H
#define CRISIS_SIM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum CsStatus {
  CS_STATUS_OK = 0,
  CS_STATUS_NULL_POINTER = 1,
  CS_STATUS_INVALID_STRING = 2,
  CS_STATUS_INVALID_INPUT = 3,
  CS_STATUS_IO = 4,
  CS_STATUS_RUNTIME = 5,
  CS_STATUS_BUFFER_TOO_SMALL = 6,
  CS_STATUS_PANIC = 7,
} CsStatus;

// Aggregated ensemble handle.
typedef struct CsEnsemble CsEnsemble;

// Calibration handle.
typedef struct CsParams CsParams;

// Scenario handle.
typedef struct CsScenario CsScenario;

// Horizon medians and path counts of an ensemble.
typedef struct CsSummary {
  double gdp_med;
  double debt_med;
  double welfare_med;
  double reserves_med;
  size_t n_paths;
  size_t n_aborted;
} CsSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *cs_version(void);

// Copy of the last error message on this thread, or NULL if none.
// Release with [`cs_string_free`].
char *cs_last_error(void);

// # Safety
// `s` must be NULL or a string returned by this library.
void cs_string_free(char *s);

// Reference calibration.
//
// # Safety
// `out` must be a valid pointer.
enum CsStatus cs_params_reference(struct CsParams **out);

// Loads and validates a parameter file.
//
// # Safety
// `path` must be a NUL-terminated string and `out` a valid pointer.
enum CsStatus cs_params_load(const char *path, struct CsParams **out);

// # Safety
// `p` must be NULL or a handle from this library, not yet freed.
void cs_params_free(struct CsParams *p);

// Scenario with no policy actions.
//
// # Safety
// `name` must be a NUL-terminated string and `out` a valid pointer.
enum CsStatus cs_scenario_baseline(const char *name, struct CsScenario **out);

// Loads a scenario file.
//
// # Safety
// `path` must be a NUL-terminated string and `out` a valid pointer.
enum CsStatus cs_scenario_load(const char *path, struct CsScenario **out);

// # Safety
// `s` must be NULL or a handle from this library, not yet freed.
void cs_scenario_free(struct CsScenario *s);

// Runs `n_paths` paths for `horizon` quarters on `threads` workers (0 = one per core)
// and aggregates them at the default quantile levels.
//
// # Safety
// Handles must be live and `out` a valid pointer.
enum CsStatus cs_ensemble_run(const struct CsParams *params,
                              const struct CsScenario *scenario,
                              uint64_t seed,
                              uint64_t n_paths,
                              uint32_t horizon,
                              size_t threads,
                              struct CsEnsemble **out);

// # Safety
// `e` must be NULL or a handle from this library, not yet freed.
void cs_ensemble_free(struct CsEnsemble *e);

// # Safety
// `e` must be live and `out` a valid pointer.
enum CsStatus cs_ensemble_summary(const struct CsEnsemble *e, struct CsSummary *out);

// Number of quantile levels in every series.
//
// # Safety
// `e` must be live and `out` a valid pointer.
enum CsStatus cs_ensemble_level_count(const struct CsEnsemble *e, size_t *out);

// Copies quantile `level_index` of `variable` for quarters `0..=horizon` into `buf`.
// `written` receives the number of quarters; if `len` is too small nothing is
// copied, `written` holds the required length and `BUFFER_TOO_SMALL` is returned.
//
// # Safety
// `e` must be live, `variable` NUL-terminated, `buf` valid for `len` doubles
// and `written` a valid pointer.
enum CsStatus cs_ensemble_series(const struct CsEnsemble *e,
                                 const char *variable,
                                 size_t level_index,
                                 double *buf,
                                 size_t len,
                                 size_t *written);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CRISIS_SIM_H */

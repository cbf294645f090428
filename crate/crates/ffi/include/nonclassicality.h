#ifndef NONCLASSICALITY_H
#define NONCLASSICALITY_H

/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define NC_TEST_ZEROS 1

#define NC_TEST_FIRST_ORDER (1 << 1)

#define NC_TEST_SECOND_ORDER (1 << 2)

#define NC_TEST_LOCAL_POISSONIAN (1 << 3)

#define NC_TEST_OSCILLATION_Q (1 << 4)

#define NC_TEST_HANKEL_Q (1 << 5)

#define NC_TEST_HANKEL_GAMMA (1 << 6)

/**
 * Result code of every fallible call.
 */
typedef enum NcStatus {
  NC_STATUS_OK = 0,
  NC_STATUS_NULL_POINTER = 1,
  NC_STATUS_INVALID_PARAMETER = 2,
  NC_STATUS_EMPTY = 3,
  NC_STATUS_NON_FINITE = 4,
  NC_STATUS_NEGATIVE_PROBABILITY = 5,
  NC_STATUS_NORMALIZATION_VIOLATION = 6,
  NC_STATUS_ZERO_DISTRIBUTION = 7,
  NC_STATUS_WINDOW_TOO_SHORT = 8,
  NC_STATUS_DIVERGENT_TAIL = 9,
  NC_STATUS_DEGENERATE_CAT = 10,
  NC_STATUS_UNDERFLOW = 11,
  NC_STATUS_QUADRATURE_NOT_CONVERGED = 12,
  NC_STATUS_PANIC = 13,
} NcStatus;

typedef enum NcNormPolicy {
  NC_NORM_POLICY_TRUNCATED = 0,
  NC_NORM_POLICY_EXACT = 1,
} NcNormPolicy;

typedef enum NcVerdict {
  NC_VERDICT_NO_VIOLATION_FOUND = 0,
  NC_VERDICT_NONCLASSICAL = 1,
} NcVerdict;

/**
 * Opaque photon-number distribution.
 */
typedef struct NcDistribution NcDistribution;

/**
 * Opaque test report.
 */
typedef struct NcReport NcReport;

/**
 * Battery settings. `max_hankel_order = 0` picks the largest order the
 * window allows; `tests` is a mask of `NC_TEST_*` bits.
 */
typedef struct NcConfig {
  double psd_tol;
  double saturation_tol;
  size_t max_hankel_order;
  uint32_t tests;
} NcConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until the
 * next failing call on the same thread.
 */
const char *nc_last_error_message(void);

/**
 * Library version as a static string.
 */
const char *nc_version(void);

/**
 * Default settings: every test except `NC_TEST_HANKEL_GAMMA`.
 */
struct NcConfig nc_config_default(void);

/**
 * Validates `values[0..len]` as a photon-number distribution.
 *
 * # Safety
 * `values` must point to `len` readable doubles and `out` must be writable.
 */
enum NcStatus nc_distribution_new(const double *values,
                                  size_t len,
                                  enum NcNormPolicy policy,
                                  double zero_tol,
                                  struct NcDistribution **out);

/**
 * # Safety
 * `out` must be writable.
 */
enum NcStatus nc_coherent(double intensity, size_t nmax, struct NcDistribution **out);

/**
 * # Safety
 * `out` must be writable.
 */
enum NcStatus nc_thermal(double mean, size_t nmax, struct NcDistribution **out);

/**
 * # Safety
 * `out` must be writable.
 */
enum NcStatus nc_fock(size_t photons, size_t nmax, struct NcDistribution **out);

/**
 * # Safety
 * `weights` and `intensities` must each point to `count` doubles.
 */
enum NcStatus nc_coherent_mixture(const double *weights,
                                  const double *intensities,
                                  size_t count,
                                  size_t nmax,
                                  struct NcDistribution **out);

/**
 * # Safety
 * `out` must be writable.
 */
enum NcStatus nc_cat_state(double intensity,
                           double theta,
                           size_t nmax,
                           struct NcDistribution **out);

/**
 * Adds `added` photons to `base`; the base handle is left untouched.
 *
 * # Safety
 * `base` must be a live handle and `out` writable.
 */
enum NcStatus nc_photon_added(const struct NcDistribution *base,
                              size_t added,
                              size_t nmax,
                              struct NcDistribution **out);

/**
 * Number of entries (`nmax + 1`), or 0 for null.
 *
 * # Safety
 * `d` must be null or a live handle.
 */
size_t nc_distribution_len(const struct NcDistribution *d);

/**
 * Copies up to `cap` entries into `buf`.
 *
 * # Safety
 * `d` must be a live handle and `buf` must hold `cap` doubles.
 */
enum NcStatus nc_distribution_values(const struct NcDistribution *d, double *buf, size_t cap);

/**
 * # Safety
 * `d` must be null or a handle not yet freed.
 */
void nc_distribution_free(struct NcDistribution *d);

/**
 * Runs the battery; a null `cfg` means [`nc_config_default`].
 *
 * # Safety
 * `d` must be a live handle, `cfg` null or valid, `out` writable.
 */
enum NcStatus nc_run_battery(const struct NcDistribution *d,
                             const struct NcConfig *cfg,
                             struct NcReport **out);

/**
 * Runs the battery on `q_n = n! p_n` supplied directly.
 *
 * # Safety
 * `q` must point to `len` doubles, `cfg` null or valid, `out` writable.
 */
enum NcStatus nc_run_battery_q(const double *q,
                               size_t len,
                               const struct NcConfig *cfg,
                               struct NcReport **out);

/**
 * # Safety
 * `r` must be a live handle.
 */
enum NcVerdict nc_report_verdict(const struct NcReport *r);

/**
 * Total witnesses over all tests, or 0 for null.
 *
 * # Safety
 * `r` must be null or a live handle.
 */
size_t nc_report_witness_count(const struct NcReport *r);

/**
 * Report as JSON; release with [`nc_string_free`]. Null on failure.
 *
 * # Safety
 * `r` must be a live handle.
 */
char *nc_report_to_json(const struct NcReport *r);

/**
 * # Safety
 * `r` must be null or a handle not yet freed.
 */
void nc_report_free(struct NcReport *r);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void nc_string_free(char *s);

/**
 * Copies the message of the last error, for callers that prefer a buffer.
 * Returns the full message length excluding the terminator.
 *
 * # Safety
 * `buf` must hold `cap` bytes, or be null with `cap = 0`.
 */
size_t nc_last_error_copy(char *buf, size_t cap);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NONCLASSICALITY_H */

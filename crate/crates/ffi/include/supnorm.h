#ifndef SUPNORM_H
#define SUPNORM_H

/* Generated by cbindgen from the supnorm-ffi crate; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Which estimate produced a bound row.
 */
typedef enum SupnormSource {
  SUPNORM_SOURCE_COMPACT_POINCARE = 0,
  SUPNORM_SOURCE_CUSP_MAXIMUM_PRINCIPLE = 1,
  SUPNORM_SOURCE_CUSP_PARABOLIC = 2,
  SUPNORM_SOURCE_COCOMPACT_EXPONENTIAL = 3,
} SupnormSource;

/**
 * Result of a call.
 */
typedef enum SupnormStatus {
  SUPNORM_STATUS_OK = 0,
  SUPNORM_STATUS_NULL_POINTER = 1,
  SUPNORM_STATUS_INVALID_ARGUMENT = 2,
  SUPNORM_STATUS_LOAD = 3,
  SUPNORM_STATUS_NUMERICAL = 4,
  SUPNORM_STATUS_NOT_FOUND = 5,
  SUPNORM_STATUS_PANIC = 6,
} SupnormStatus;

/**
 * Opaque fundamental domain.
 */
typedef struct SupnormDomain SupnormDomain;

/**
 * Opaque result of running the bound engine.
 */
typedef struct SupnormReport SupnormReport;

/**
 * One row of a bound report. `cusp` is −1 for the compact part and the
 * zero-based cusp index otherwise; `lower` is NaN when no lower bound applies.
 */
typedef struct SupnormBoundRow {
  uint32_t k;
  int32_t cusp;
  double upper;
  double lower;
  enum SupnormSource source;
} SupnormBoundRow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until the next failing call.
 */
const char *supnorm_last_error(void);

/**
 * Loads a domain description from a JSON file.
 *
 * # Safety
 * `path` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum SupnormStatus supnorm_domain_load(const char *path, struct SupnormDomain **out);

/**
 * Parses a domain description from JSON text.
 *
 * # Safety
 * `json` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum SupnormStatus supnorm_domain_from_json(const char *json, struct SupnormDomain **out);

/**
 * The bundled standard domain of the modular group.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum SupnormStatus supnorm_domain_psl2z(struct SupnormDomain **out);

/**
 * # Safety
 * `d` must come from this library and not be used afterwards. Null is ignored.
 */
void supnorm_domain_free(struct SupnormDomain *d);

/**
 * # Safety
 * `d` must be a live domain handle and `out` a valid pointer.
 */
enum SupnormStatus supnorm_domain_covolume(const struct SupnormDomain *d, double *out);

/**
 * Dimension of the space of cusp forms of weight `2k`.
 *
 * # Safety
 * `d` must be a live domain handle and `out` a valid pointer.
 */
enum SupnormStatus supnorm_domain_dimension(const struct SupnormDomain *d, int64_t k, int64_t *out);

/**
 * Computes the constants and the bound table for `k_min ≤ k ≤ k_max`.
 *
 * # Safety
 * `d` must be a live domain handle and `out` a valid pointer.
 */
enum SupnormStatus supnorm_run(const struct SupnormDomain *d,
                               double y0,
                               uint32_t k_min,
                               uint32_t k_max,
                               struct SupnormReport **out);

/**
 * # Safety
 * `r` must come from this library and not be used afterwards. Null is ignored.
 */
void supnorm_report_free(struct SupnormReport *r);

/**
 * Number of rows, or 0 for a null handle.
 *
 * # Safety
 * `r` must be null or a live report handle.
 */
size_t supnorm_report_row_count(const struct SupnormReport *r);

/**
 * # Safety
 * `r` must be a live report handle and `out` a valid pointer.
 */
enum SupnormStatus supnorm_report_row(const struct SupnormReport *r,
                                      size_t index,
                                      struct SupnormBoundRow *out);

/**
 * Value of a named ledger constant (for example `"B_Y"` or `"sigma_Y"`).
 * Returns `NotFound` for unknown names and for constants absent on this domain.
 *
 * # Safety
 * `r` must be a live report handle, `name` a NUL-terminated string and `out` a valid pointer.
 */
enum SupnormStatus supnorm_report_constant(const struct SupnormReport *r,
                                           const char *name,
                                           double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SUPNORM_H */

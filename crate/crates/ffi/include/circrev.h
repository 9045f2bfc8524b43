#ifndef CIRCREV_H
#define CIRCREV_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Which group the involutions are taken from.
 */
typedef enum CrGroup {
  /**
   * Orientation preserving homeomorphisms.
   */
  CR_GROUP_HPLUS = 0,
  /**
   * All homeomorphisms.
   */
  CR_GROUP_H = 1,
} CrGroup;

/**
 * Status codes. The first three mirror the command line exit codes.
 */
typedef enum CrStatus {
  /**
   * Success, a `yes` answer or a passing verification.
   */
  CR_STATUS_OK = 0,
  /**
   * A `no` answer, a refused factorization or a failing verification.
   */
  CR_STATUS_NO = 1,
  /**
   * The answer could not be certified within the limits.
   */
  CR_STATUS_UNKNOWN = 2,
  /**
   * Null pointer, bad UTF-8 or an out of range argument.
   */
  CR_STATUS_INVALID_ARGUMENT = 3,
  /**
   * Malformed JSON.
   */
  CR_STATUS_PARSE = 4,
  /**
   * Well-formed input that is not a valid map or archive.
   */
  CR_STATUS_INVALID_MAP = 5,
  /**
   * Evaluation hit its iteration cap.
   */
  CR_STATUS_ITERATION_CAP = 6,
  /**
   * Any other library error.
   */
  CR_STATUS_FAILED = 7,
  /**
   * A panic was caught at the boundary.
   */
  CR_STATUS_PANIC = 8,
} CrStatus;

/**
 * Opaque handle to a piecewise-linear circle map.
 */
typedef struct CrMap CrMap;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses a map description (`{"degree": .., "vertices": [[x, y], ..]}`).
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum CrStatus cr_map_from_json(const char *json, struct CrMap **out);

/**
 * Releases a map. Null is ignored.
 *
 * # Safety
 * `m` must come from [`cr_map_from_json`] and not be freed twice.
 */
void cr_map_free(struct CrMap *m);

/**
 * Degree of the map (1 or -1), or 0 for a null handle.
 *
 * # Safety
 * `m` must be null or a live handle.
 */
int32_t cr_map_degree(const struct CrMap *m);

/**
 * Canonical JSON of the map.
 *
 * # Safety
 * `m` must be a live handle and `out` a valid pointer.
 */
enum CrStatus cr_map_to_json(const struct CrMap *m, char **out);

/**
 * Analysis report as JSON. Zero limits select the defaults.
 *
 * # Safety
 * `m` must be a live handle and `out` a valid pointer.
 */
enum CrStatus cr_analyze(const struct CrMap *m, uint64_t max_period, uint64_t max_iter, char **out);

/**
 * Decides strong reversibility. Returns `Ok`, `No` or `Unknown` and writes
 * the decision report to `out`.
 *
 * # Safety
 * `m` must be a live handle and `out` a valid pointer.
 */
enum CrStatus cr_decide(const struct CrMap *m,
                        enum CrGroup group,
                        uint64_t max_period,
                        uint64_t max_iter,
                        char **out);

/**
 * Factors the map into `involutions` (2 or 3) involutions and verifies the
 * witness at `samples` points drawn with `seed`.
 *
 * On success `out_report` receives the factor report and `out_archive` the
 * witness archive. A refusal returns `No` or `Unknown`, fills `out_report`
 * and leaves `out_archive` null.
 *
 * # Safety
 * `m` must be a live handle; both output pointers must be valid.
 */
enum CrStatus cr_factor(const struct CrMap *m,
                        uint32_t involutions,
                        enum CrGroup group,
                        uint32_t samples,
                        uint64_t seed,
                        char **out_report,
                        char **out_archive);

/**
 * Re-verifies a witness archive, optionally against `m` (may be null).
 * Returns `Ok` when every identity holds and `No` otherwise; `out` receives
 * the verification report.
 *
 * # Safety
 * `archive` must be a NUL-terminated string, `m` null or a live handle and
 * `out` a valid pointer.
 */
enum CrStatus cr_verify(const char *archive, const struct CrMap *m, char **out);

/**
 * Releases a string returned by the library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void cr_string_free(char *s);

/**
 * Message of the last failure on this thread, or null. The pointer stays
 * valid until the next call on the same thread.
 */
const char *cr_last_error(void);

/**
 * Library version as a static string.
 */
const char *cr_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CIRCREV_H */

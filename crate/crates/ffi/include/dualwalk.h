#ifndef DUALWALK_H
#define DUALWALK_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes.
 */
typedef enum DwStatus {
  DW_STATUS_OK = 0,
  DW_STATUS_NULL_POINTER = 1,
  /**
   * Malformed argument: bad index, bad UTF-8, unknown name.
   */
  DW_STATUS_INVALID_ARGUMENT = 2,
  /**
   * `k` not decreasing or `m` not interlacing.
   */
  DW_STATUS_INVALID_STATE = 3,
  DW_STATUS_MECHANISM_UNAVAILABLE = 4,
  /**
   * Request exceeds a documented cap.
   */
  DW_STATUS_RESOURCE = 5,
  /**
   * An identity check found a mismatch.
   */
  DW_STATUS_CHECK_FAILED = 6,
  /**
   * Output buffer too small.
   */
  DW_STATUS_BUFFER_TOO_SMALL = 7,
  DW_STATUS_INTERNAL = 99,
} DwStatus;

/**
 * Sampler for the increase substep.
 */
typedef enum DwMechanism {
  DW_MECHANISM_DIRECT = 0,
  DW_MECHANISM_URN = 1,
  DW_MECHANISM_YOUNG = 2,
} DwMechanism;

/**
 * Random stream.
 */
typedef struct DwRng DwRng;

/**
 * State `m` together with its weight.
 */
typedef struct DwState DwState;

/**
 * Fixed weight `k`.
 */
typedef struct DwWeight DwWeight;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failure on this thread. Valid until the next call
 * into this library from the same thread; never null.
 */
const char *dw_last_error(void);

/**
 * Library version as a static string.
 */
const char *dw_version(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void dw_string_free(char *s);

/**
 * Builds a weight from `len` integers.
 *
 * # Safety
 * `k` must point to `len` readable values; `out` must be writable.
 */
enum DwStatus dw_weight_new(const int64_t *k, size_t len, struct DwWeight **out);

/**
 * # Safety
 * `w` must come from [`dw_weight_new`] and not have been freed. Null is ignored.
 */
void dw_weight_free(struct DwWeight *w);

/**
 * Builds a state of `len = n + 1` entries interlacing `weight`.
 *
 * # Safety
 * `weight` must be a live handle, `m` must point to `len` values, `out` must be writable.
 */
enum DwStatus dw_state_new(const struct DwWeight *weight,
                           const int64_t *m,
                           size_t len,
                           struct DwState **out);

/**
 * # Safety
 * `s` must come from this library and not have been freed. Null is ignored.
 */
void dw_state_free(struct DwState *s);

/**
 * Number of entries `n + 1` of a state; 0 for null.
 *
 * # Safety
 * `s` must be a live handle or null.
 */
size_t dw_state_len(const struct DwState *s);

/**
 * Copies the entries of `s` into `buf`, which holds `cap` values.
 *
 * # Safety
 * `s` must be a live handle; `buf` must be writable for `cap` values.
 */
enum DwStatus dw_state_entries(const struct DwState *s, int64_t *buf, size_t cap);

/**
 * `a_i^2(m)`, `1 <= i <= n + 1`, as an exact `"p/q"` string and/or a double.
 * Either out pointer may be null.
 *
 * # Safety
 * `s` must be a live handle; non-null out pointers must be writable.
 */
enum DwStatus dw_a_sq(const struct DwState *s, size_t i, char **pq, double *value);

/**
 * `b_i^2(m)`; same conventions as [`dw_a_sq`].
 *
 * # Safety
 * As for [`dw_a_sq`].
 */
enum DwStatus dw_b_sq(const struct DwState *s, size_t i, char **pq, double *value);

/**
 * Random stream `stream` of `seed`; walker `i` of a simulation uses stream `i`.
 *
 * # Safety
 * `out` must be writable.
 */
enum DwStatus dw_rng_new(uint64_t seed, uint64_t stream, struct DwRng **out);

/**
 * # Safety
 * `r` must come from [`dw_rng_new`] and not have been freed. Null is ignored.
 */
void dw_rng_free(struct DwRng *r);

/**
 * One composed step; writes a new state handle to `out`.
 *
 * # Safety
 * `s` and `rng` must be live handles; `out` must be writable.
 */
enum DwStatus dw_full_step(const struct DwState *s,
                           struct DwRng *rng,
                           enum DwMechanism mechanism,
                           struct DwState **out);

/**
 * Increase substep only.
 *
 * # Safety
 * As for [`dw_full_step`].
 */
enum DwStatus dw_step_increase(const struct DwState *s,
                               struct DwRng *rng,
                               enum DwMechanism mechanism,
                               struct DwState **out);

/**
 * Decrease substep only.
 *
 * # Safety
 * As for [`dw_full_step`].
 */
enum DwStatus dw_step_decrease(const struct DwState *s, struct DwRng *rng, struct DwState **out);

/**
 * Checks the block factorization over `levels` levels. Writes the number of
 * identities checked to `identities` (may be null). Returns
 * [`DwStatus::CheckFailed`] on any mismatch.
 *
 * # Safety
 * `weight` must be a live handle; `identities` null or writable.
 */
enum DwStatus dw_factor_check(const struct DwWeight *weight, int64_t levels, size_t *identities);

/**
 * `|S_{j,n+1}|` as a decimal string.
 *
 * # Safety
 * `out` must be writable.
 */
enum DwStatus dw_class_cardinality(size_t j, size_t n, char **out);

/**
 * Parses a mechanism name (`direct`, `urn`, `young`).
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be writable.
 */
enum DwStatus dw_mechanism_parse(const char *name, enum DwMechanism *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DUALWALK_H */

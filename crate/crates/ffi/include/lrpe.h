#ifndef LRPE_H
#define LRPE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Result code of every fallible call.
 */
typedef enum LrpeStatus {
  LRPE_STATUS_OK = 0,
  LRPE_STATUS_NULL_POINTER = 1,
  LRPE_STATUS_INVALID_UTF8 = 2,
  LRPE_STATUS_INVALID_SPEC = 3,
  LRPE_STATUS_DIMENSION_MISMATCH = 4,
  LRPE_STATUS_OFFSET_OUT_OF_RANGE = 5,
  LRPE_STATUS_NEGATIVE_POSITION = 6,
  LRPE_STATUS_DEGENERATE_NORMALIZER = 7,
  LRPE_STATUS_UNSUPPORTED = 8,
  LRPE_STATUS_INTERNAL = 9,
} LrpeStatus;

/**
 * Opaque encoding handle.
 */
typedef struct LrpeTransform LrpeTransform;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses `spec` (e.g. `"orthogonal:householder:a:64:seed=7"`) and stores a
 * new handle in `*out`.
 *
 * # Safety
 * `spec` must be a NUL-terminated string and `out` a valid pointer.
 */
enum LrpeStatus lrpe_transform_new(const char *spec, struct LrpeTransform **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `h` must come from [`lrpe_transform_new`] and not be used afterwards.
 */
void lrpe_transform_free(struct LrpeTransform *h);

/**
 * Model dimension `d`, or 0 for a null handle.
 *
 * # Safety
 * `h` must be null or a live handle.
 */
size_t lrpe_transform_dim(const struct LrpeTransform *h);

/**
 * Whether encoded vectors and `W_s` are complex.
 *
 * # Safety
 * `h` must be null or a live handle.
 */
bool lrpe_transform_is_complex(const struct LrpeTransform *h);

/**
 * Copies the canonical spec string into `buf` (NUL-terminated, truncated
 * to `len`) and returns the full length excluding the NUL.
 *
 * # Safety
 * `h` must be a live handle; `buf` must hold `len` bytes or be null.
 */
size_t lrpe_transform_spec(const struct LrpeTransform *h, char *buf, size_t len);

/**
 * Encodes an `n × d` sequence: row `s` becomes `Λ^(s) P x_s`. `out_im`
 * may be null for real families.
 *
 * # Safety
 * `x`, `out_re` (and `out_im` when non-null) must hold `n·d` doubles.
 */
enum LrpeStatus lrpe_encode(const struct LrpeTransform *h,
                            const double *x,
                            size_t n,
                            size_t d,
                            double *out_re,
                            double *out_im);

/**
 * Dense `W_s = Pᴴ Λ^(s) P`, `d × d`.
 *
 * # Safety
 * `out_re` (and `out_im` when non-null) must hold `d·d` doubles.
 */
enum LrpeStatus lrpe_materialize(const struct LrpeTransform *h,
                                 size_t s,
                                 double *out_re,
                                 double *out_im);

/**
 * `W_r` evaluated through anchor `a ≥ 0`, `d × d`.
 *
 * # Safety
 * `out_re` (and `out_im` when non-null) must hold `d·d` doubles.
 */
enum LrpeStatus lrpe_relative_matrix(const struct LrpeTransform *h,
                                     int64_t r,
                                     int64_t anchor,
                                     double *out_re,
                                     double *out_im);

/**
 * Linear attention with `φ = 1 + elu`, encoded by `h` (null for no
 * encoding). `O` is `n × dv`.
 *
 * # Safety
 * `q`, `k` hold `n·d` doubles; `v` and `out` hold `n·dv` doubles.
 */
enum LrpeStatus lrpe_linear_attention(const struct LrpeTransform *h,
                                      const double *q,
                                      const double *k,
                                      const double *v,
                                      size_t n,
                                      size_t d,
                                      size_t dv,
                                      bool causal,
                                      double *out);

/**
 * Softmax attention, `O(n²d)`.
 *
 * # Safety
 * `q`, `k` hold `n·d` doubles; `v` and `out` hold `n·dv` doubles.
 */
enum LrpeStatus lrpe_vanilla_attention(const double *q,
                                       const double *k,
                                       const double *v,
                                       size_t n,
                                       size_t d,
                                       size_t dv,
                                       bool causal,
                                       double *out);

/**
 * Message for the last failed call on this thread; empty after a success.
 * Valid until the next call on the same thread.
 */
const char *lrpe_last_error_message(void);

/**
 * Library version, static NUL-terminated string.
 */
const char *lrpe_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LRPE_H */

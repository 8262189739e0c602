#ifndef SHRINKER_H
#define SHRINKER_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ShrinkerStatus {
  SHRINKER_STATUS_OK = 0,
  SHRINKER_STATUS_NULL_POINTER = 1,
  SHRINKER_STATUS_INVALID_INPUT = 2,
  /**
   * The geodesic solver stopped without meeting its tolerances.
   */
  SHRINKER_STATUS_NON_CONVERGENCE = 3,
  /**
   * The curve is not a shrinker cross-section: ambiguous normals, missing
   * symmetry modes or no positive mode up to the `k` limit.
   */
  SHRINKER_STATUS_CONSISTENCY = 4,
  SHRINKER_STATUS_IO = 5,
  SHRINKER_STATUS_PARSE = 6,
  /**
   * Any other numerical failure.
   */
  SHRINKER_STATUS_RUNTIME = 7,
  SHRINKER_STATUS_PANIC = 8,
} ShrinkerStatus;

/**
 * Opaque discrete cross-section curve.
 */
typedef struct ShrinkerCurve ShrinkerCurve;

typedef struct ShrinkerIndex {
  size_t index;
  /**
   * Negative eigenvalues counted with multiplicity, before exclusions.
   */
  size_t negative;
  /**
   * Dilation and translation modes removed from the count.
   */
  size_t excluded;
} ShrinkerIndex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Solves for the cross-section with `points` vertices from the default seed.
 *
 * # Safety
 * `out` must be valid for a pointer write.
 */
enum ShrinkerStatus shrinker_solve(size_t points, struct ShrinkerCurve **out);

/**
 * Builds a curve from `n` points `(r[i], z[i])`.
 *
 * # Safety
 * `r` and `z` must each point to `n` readable doubles; `out` must be valid
 * for a pointer write.
 */
enum ShrinkerStatus shrinker_curve_from_points(const double *r,
                                               const double *z,
                                               size_t n,
                                               struct ShrinkerCurve **out);

/**
 * Reads a curve CSV with header `m,r,z`.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be valid for a pointer
 * write.
 */
enum ShrinkerStatus shrinker_curve_read_csv(const char *path, struct ShrinkerCurve **out);

/**
 * # Safety
 * `curve` must be a live handle; `path` a NUL-terminated string.
 */
enum ShrinkerStatus shrinker_curve_write_csv(const struct ShrinkerCurve *curve, const char *path);

/**
 * Number of points, or 0 for a null handle.
 *
 * # Safety
 * `curve` must be null or a live handle.
 */
size_t shrinker_curve_len(const struct ShrinkerCurve *curve);

/**
 * Copies the coordinates into `r` and `z`, which hold `capacity` doubles
 * each. Fails with `InvalidInput` if `capacity` is below the curve length.
 *
 * # Safety
 * `curve` must be a live handle; `r` and `z` must each be writable for
 * `capacity` doubles.
 */
enum ShrinkerStatus shrinker_curve_copy_points(const struct ShrinkerCurve *curve,
                                               double *r,
                                               double *z,
                                               size_t capacity);

/**
 * Discrete length of the curve in the half-plane metric, which is the
 * entropy estimate for a solved cross-section.
 *
 * # Safety
 * `curve` must be a live handle; `out` valid for a write.
 */
enum ShrinkerStatus shrinker_curve_entropy(const struct ShrinkerCurve *curve, double *out);

/**
 * Lowest `count` eigenvalues of `-L_k`, ascending.
 *
 * # Safety
 * `curve` must be a live handle; `out` writable for `count` doubles.
 */
enum ShrinkerStatus shrinker_spectrum(const struct ShrinkerCurve *curve,
                                      uint32_t k,
                                      size_t count,
                                      double *out);

/**
 * Morse index with dilations and translations removed, scanning
 * `k = 0..=k_max`.
 *
 * # Safety
 * `curve` must be a live handle; `out` valid for a write.
 */
enum ShrinkerStatus shrinker_index(const struct ShrinkerCurve *curve,
                                   uint32_t k_max,
                                   struct ShrinkerIndex *out);

/**
 * # Safety
 * `curve` must be null or a handle not yet freed.
 */
void shrinker_curve_free(struct ShrinkerCurve *curve);

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len - 1` bytes) and returns the full message length. The
 * message is empty after a successful call.
 *
 * # Safety
 * `buf` must be null or writable for `len` bytes.
 */
size_t shrinker_last_error(char *buf, size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SHRINKER_H */

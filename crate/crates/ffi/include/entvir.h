#ifndef ENTVIR_H
#define ENTVIR_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum EntvirStatus {
  ENTVIR_STATUS_OK = 0,
  ENTVIR_STATUS_NULL_POINTER = 1,
  ENTVIR_STATUS_INVALID_ARGUMENT = 2,
  ENTVIR_STATUS_NUMERICAL = 3,
  ENTVIR_STATUS_PANIC = 4,
} EntvirStatus;

/**
 * A diagonalized interval of a critical chain.
 */
typedef struct EntvirInterval EntvirInterval;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Diagonalizes an interval of `size` sites at the critical point
 * `(lambda, gamma)` and stores a new handle in `*out`.
 *
 * # Safety
 * `out` must be valid for writing one pointer.
 */
enum EntvirStatus entvir_interval_new(double lambda,
                                      double gamma,
                                      size_t size,
                                      struct EntvirInterval **out);

/**
 * Releases a handle; null is ignored.
 *
 * # Safety
 * `handle` must come from [`entvir_interval_new`] and not be used afterwards.
 */
void entvir_interval_free(struct EntvirInterval *handle);

/**
 * Number of sites (and entanglement modes).
 *
 * # Safety
 * `handle` must be a live handle and `out` writable.
 */
enum EntvirStatus entvir_interval_modes(const struct EntvirInterval *handle, size_t *out);

/**
 * Single-particle entanglement energies, ascending; `len` must equal the
 * number of modes.
 *
 * # Safety
 * `out` must hold `len` doubles.
 */
enum EntvirStatus entvir_interval_single_particle_energies(const struct EntvirInterval *handle,
                                                           double *out,
                                                           size_t len);

/**
 * Entanglement entropy of the interval.
 *
 * # Safety
 * `handle` must be a live handle and `out` writable.
 */
enum EntvirStatus entvir_interval_entropy(const struct EntvirInterval *handle, double *out);

/**
 * The `count` lowest entanglement energies `E_a` and Schmidt weights.
 * Either output may be null.
 *
 * # Safety
 * Non-null outputs must hold `count` doubles.
 */
enum EntvirStatus entvir_interval_schmidt(const struct EntvirInterval *handle,
                                          size_t count,
                                          double *energies,
                                          double *weights);

/**
 * Rescaled dimensions `h_a` of the `count` lowest Schmidt states.
 *
 * # Safety
 * `out` must hold `count` doubles.
 */
enum EntvirStatus entvir_interval_dimensions(const struct EntvirInterval *handle,
                                             size_t count,
                                             double epsilon,
                                             double *out);

/**
 * `<v_a| H_n |v_b>` (or `L_n` when `virasoro` is nonzero) between the
 * `count` lowest Schmidt states, in their energy order and raw gauge.
 *
 * # Safety
 * `re` and `im` must each hold `count * count` doubles.
 */
enum EntvirStatus entvir_interval_generator_table(const struct EntvirInterval *handle,
                                                  int32_t n,
                                                  int32_t virasoro,
                                                  size_t count,
                                                  double epsilon,
                                                  double *re,
                                                  double *im);

/**
 * Cutoff fitted from the first entanglement gap over `sizes`.
 *
 * # Safety
 * `sizes` must hold `len` values and `epsilon` be writable.
 */
enum EntvirStatus entvir_fit_epsilon(double lambda,
                                     double gamma,
                                     const size_t *sizes,
                                     size_t len,
                                     double *epsilon);

/**
 * Copies the calling thread's last error message into `buf` (truncated,
 * NUL-terminated) and returns its full length in bytes, excluding the NUL.
 *
 * # Safety
 * `buf` must hold `len` bytes, or be null with `len == 0`.
 */
size_t entvir_last_error_message(char *buf, size_t len);

/**
 * Library version as a static NUL-terminated string.
 */
const char *entvir_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ENTVIR_H */

#ifndef COEP_H
#define COEP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result of every call.
 */
typedef enum CoepStatus {
  COEP_STATUS_OK = 0,
  COEP_STATUS_NULL_POINTER = 1,
  COEP_STATUS_INVALID_INPUT = 2,
  COEP_STATUS_SHAPE = 3,
  COEP_STATUS_SINGULAR = 4,
  COEP_STATUS_CONTRACT = 5,
  COEP_STATUS_PRECONDITION = 6,
  COEP_STATUS_UNSUPPORTED = 7,
  COEP_STATUS_NOT_MP_INVERTIBLE = 8,
  COEP_STATUS_PARSE = 9,
  COEP_STATUS_INTERNAL = 10,
} CoepStatus;

/*
 Opaque square or rectangular complex matrix.
 */
typedef struct CoepMatrix CoepMatrix;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failed call on this thread, or NULL. Owned by the
 library.
 */
const char *coep_last_error(void);

/*
 Library version as a static string.
 */
const char *coep_version(void);

/*
 Builds a `rows x cols` matrix from `2 * rows * cols` interleaved doubles.

 # Safety
 `entries` must point to `2 * rows * cols` readable doubles and `out` must
 be writable.
 */
enum CoepStatus coep_matrix_new(size_t rows,
                                size_t cols,
                                const double *entries,
                                struct CoepMatrix **out);

/*
 Releases a handle. NULL is ignored.

 # Safety
 `m` must come from this library and not be used afterwards.
 */
void coep_matrix_free(struct CoepMatrix *m);

/*
 Row count, or 0 for NULL.

 # Safety
 `m` must be NULL or a live handle.
 */
size_t coep_matrix_rows(const struct CoepMatrix *m);

/*
 Column count, or 0 for NULL.

 # Safety
 `m` must be NULL or a live handle.
 */
size_t coep_matrix_cols(const struct CoepMatrix *m);

/*
 Copies the entries, interleaved and row-major, into `out[0..len]`;
 `len` must equal `2 * rows * cols`.

 # Safety
 `out` must point to `len` writable doubles.
 */
enum CoepStatus coep_matrix_copy_entries(const struct CoepMatrix *m, double *out, size_t len);

/*
 Parses the JSON matrix format `{"rows", "cols", "entries": [[re, im], ...]}`.

 # Safety
 `json` must be a NUL-terminated string and `out` writable.
 */
enum CoepStatus coep_matrix_from_json(const char *json, struct CoepMatrix **out);

/*
 Serializes a matrix; release the string with `coep_string_free`.

 # Safety
 `m` must be a live handle and `out` writable.
 */
enum CoepStatus coep_matrix_to_json(const struct CoepMatrix *m, char **out);

/*
 Releases a string returned by this library. NULL is ignored.

 # Safety
 `s` must come from this library and not be used afterwards.
 */
void coep_string_free(char *s);

/*
 Euclidean Moore-Penrose inverse. Fails with `Contract` if the computed
 inverse does not certify.

 # Safety
 `a` must be a live handle and `out` writable.
 */
enum CoepStatus coep_mp_inverse_l2(const struct CoepMatrix *a, struct CoepMatrix **out);

/*
 Induced operator norm; `norm` is `"l1"`, `"l2"`, `"linf"` or `"lp:<p>"`.

 # Safety
 `a` must be a live handle, `norm` a NUL-terminated string and `out`
 writable.
 */
enum CoepStatus coep_operator_norm(const struct CoepMatrix *a, const char *norm, double *out);

/*
 Classification report as JSON. A matrix without a Moore-Penrose inverse
 under `norm` still yields `Ok` with `mp_invertible: false`.

 # Safety
 `a` must be a live handle, `norm` a NUL-terminated string and `out`
 writable.
 */
enum CoepStatus coep_classify_json(const struct CoepMatrix *a, const char *norm, char **out);

/*
 Moore-Penrose inverse of `b` from the closed form around `a` under the
 Euclidean norm. Fails with `Precondition` unless the pair obeys (P).

 # Safety
 `a` and `b` must be live handles and `out` writable.
 */
enum CoepStatus coep_perturbed_mp(const struct CoepMatrix *a,
                                  const struct CoepMatrix *b,
                                  struct CoepMatrix **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* COEP_H */

/* C interface for the framealg frame-reconstruction library. */

#pragma once

/* Generated with cbindgen:0.27.0 */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status code of a C-ABI call.
typedef enum FaStatus {
  FA_STATUS_OK = 0,
  FA_STATUS_NULL_POINTER = 1,
  FA_STATUS_DIMENSION_MISMATCH = 2,
  FA_STATUS_NOT_A_FRAME = 3,
  FA_STATUS_NON_FINITE = 4,
  FA_STATUS_STALLED_ACTIVE_SET = 5,
  FA_STATUS_INVALID_PARAMETER = 6,
  FA_STATUS_INTERNAL_ERROR = 7,
} FaStatus;

// Opaque frame handle.
typedef struct FaFrame FaFrame;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Creates a frame from `count` row vectors of length `dim`, stored
// contiguously row-major in `data`. On success writes the new handle
// to `out`; free it with [`fa_frame_free`].
//
// # Safety
// `data` must point to `count * dim` readable doubles and `out` to a
// writable pointer slot.
enum FaStatus fa_frame_new(const double *data, size_t count, size_t dim, struct FaFrame **out);

// Releases a frame handle. A null pointer is a no-op.
//
// # Safety
// `frame` must be null or a pointer returned by [`fa_frame_new`] that
// has not been freed yet.
void fa_frame_free(struct FaFrame *frame);

// Number of frame vectors N; 0 for a null handle.
//
// # Safety
// `frame` must be null or a live handle.
size_t fa_frame_count(const struct FaFrame *frame);

// Ambient dimension d; 0 for a null handle.
//
// # Safety
// `frame` must be null or a live handle.
size_t fa_frame_dim(const struct FaFrame *frame);

// Optimal frame bounds (the extreme eigenvalues of the frame
// operator). Fails with `NotAFrame` when the vectors do not span.
//
// # Safety
// `frame` must be a live handle; `lower` and `upper` must be writable.
enum FaStatus fa_frame_bounds(const struct FaFrame *frame, double *lower, double *upper);

// Analysis operator: writes the N coefficients ⟨x, x_j⟩ to `out`.
//
// # Safety
// `x` must hold `x_len` doubles and `out` must hold `out_len` writable
// doubles (`x_len == dim`, `out_len == count`).
enum FaStatus fa_analyze(const struct FaFrame *frame,
                         const double *x,
                         size_t x_len,
                         double *out,
                         size_t out_len);

// Synthesis operator: writes Σ c_j x_j to `out`.
//
// # Safety
// `coeffs` must hold `coeffs_len` doubles and `out` must hold
// `out_len` writable doubles (`coeffs_len == count`, `out_len == dim`).
enum FaStatus fa_synthesize(const struct FaFrame *frame,
                            const double *coeffs,
                            size_t coeffs_len,
                            double *out,
                            size_t out_len);

// Classical frame algorithm with fixed relaxation `alpha`. Runs at
// most `max_iters` steps, stopping early once the residual falls to
// `residual_tol` (pass a negative tolerance for the machine-level
// default). Writes the final iterate to `out_x` and, when `iterations`
// is non-null, the number of steps taken.
//
// # Safety
// Pointer arguments must reference buffers of the stated lengths;
// `out_len` must equal the frame dimension.
enum FaStatus fa_reconstruct_classical(const struct FaFrame *frame,
                                       const double *coeffs,
                                       size_t coeffs_len,
                                       double alpha,
                                       size_t max_iters,
                                       double residual_tol,
                                       double *out_x,
                                       size_t out_len,
                                       size_t *iterations);

// Greedy frame algorithm (adaptive S-norm step): reconstructs from
// possibly noisy coefficients without knowledge of the frame bounds.
//
// # Safety
// As for [`fa_reconstruct_classical`].
enum FaStatus fa_reconstruct_greedy(const struct FaFrame *frame,
                                    const double *coeffs,
                                    size_t coeffs_len,
                                    size_t max_iters,
                                    double residual_tol,
                                    double *out_x,
                                    size_t out_len,
                                    size_t *iterations);

// λ-saturated frame algorithm over clipped coefficients (entries in
// [−lambda, lambda]; values at ±lambda count as saturated). `greedy`
// selects the adaptive step; otherwise `relaxation` is used as the
// fixed step.
//
// # Safety
// As for [`fa_reconstruct_classical`].
enum FaStatus fa_reconstruct_saturated(const struct FaFrame *frame,
                                       const double *coeffs,
                                       size_t coeffs_len,
                                       double lambda,
                                       bool greedy,
                                       double relaxation,
                                       size_t max_iters,
                                       double residual_tol,
                                       double *out_x,
                                       size_t out_len,
                                       size_t *iterations);

// Static description of a status code.
const char *fa_status_message(enum FaStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#ifndef MIXQUANT_H
#define MIXQUANT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Returned through `k`, `n1` or `n2` when that count does not apply.
#define MQ_NO_COUNT ~0

typedef enum MqModel {
  MQ_MODEL_CIRCLE_DIAMETER = 0,
  MQ_MODEL_DISCONNECTED = 1,
  MQ_MODEL_CONNECTED = 2,
} MqModel;

typedef enum MqStatus {
  MQ_STATUS_OK = 0,
  MQ_STATUS_INVALID_ARG = 1,
  MQ_STATUS_NON_CONVERGENCE = 2,
  MQ_STATUS_ZERO_MASS = 3,
  MQ_STATUS_DEGENERATE_CELL = 4,
  MQ_STATUS_NO_REAL_SOLUTION = 5,
  MQ_STATUS_ASSERTION = 6,
  MQ_STATUS_NULL_POINTER = 7,
  MQ_STATUS_BUFFER_TOO_SMALL = 8,
  MQ_STATUS_PANIC = 9,
} MqStatus;

// One of the three model measures.
typedef struct MqMeasure MqMeasure;

// An optimal or oracle codebook with its error.
typedef struct MqResult MqResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failing call on this thread, or an empty string.
// The pointer stays valid until the next failing call on the same thread.
const char *mq_last_error(void);

// Closed-form optimal set of `n`-means for `model`.
//
// # Safety
// `out` must point to writable storage for one pointer.
enum MqStatus mq_optimal_set(enum MqModel model, size_t n, struct MqResult **out);

// Best-of-`restarts` Lloyd iteration with the given seed and tolerance.
//
// # Safety
// `out` must point to writable storage for one pointer.
enum MqStatus mq_lloyd(enum MqModel model,
                       size_t n,
                       uint64_t seed,
                       size_t restarts,
                       double tol,
                       struct MqResult **out);

// Exhaustive partition search, `n ≤ 3`, `grid ≥ 512`.
//
// # Safety
// `out` must point to writable storage for one pointer.
enum MqStatus mq_brute_force(enum MqModel model, size_t n, size_t grid, struct MqResult **out);

// Number of points; 0 for a null handle.
//
// # Safety
// `r` must be null or a live handle from this library.
size_t mq_result_len(const struct MqResult *r);

// Coordinates per point (1 or 2); 0 for a null handle.
//
// # Safety
// `r` must be null or a live handle from this library.
size_t mq_result_dim(const struct MqResult *r);

// Quantization error; NaN for a null handle.
//
// # Safety
// `r` must be null or a live handle from this library.
double mq_result_error(const struct MqResult *r);

// Copies the points, row-major, into `buf` of `len * dim` doubles.
//
// # Safety
// `r` must be a live handle; `buf` must hold `buf_len` writable doubles.
enum MqStatus mq_result_points(const struct MqResult *r, double *buf, size_t buf_len);

// Allocation of the codebook. For the circle model all three counts are
// set; for the interval models only `k`. Missing counts are
// [`MQ_NO_COUNT`]. Any output pointer may be null.
//
// # Safety
// `r` must be a live handle; non-null outputs must be writable.
enum MqStatus mq_result_allocation(const struct MqResult *r, size_t *k, size_t *n1, size_t *n2);

// Writes the exact error as a NUL-terminated "p/q" string. Returns
// `NoRealSolution` when no exact value is known; `BufferTooSmall` when
// `buf_len` cannot hold the string and its terminator.
//
// # Safety
// `r` must be a live handle; `buf` must hold `buf_len` writable bytes.
enum MqStatus mq_result_error_exact(const struct MqResult *r, char *buf, size_t buf_len);

// # Safety
// `r` must be null or a handle from this library not yet freed.
void mq_result_free(struct MqResult *r);

// # Safety
// `out` must point to writable storage for one pointer.
enum MqStatus mq_measure_new(enum MqModel model, struct MqMeasure **out);

// Expected squared distance to the nearest of `n` points given row-major
// in `points` (`n * dim` doubles, dim as for the model).
//
// # Safety
// `m` must be a live handle; `points` must hold `n * dim` doubles; `out`
// must be writable.
enum MqStatus mq_measure_distortion(const struct MqMeasure *m,
                                    const double *points,
                                    size_t n,
                                    double *out);

// Mean and variance of the measure; `mean` receives `dim` doubles.
//
// # Safety
// `m` must be a live handle; `mean` must hold two doubles; `variance`
// must be writable.
enum MqStatus mq_measure_moments(const struct MqMeasure *m, double *mean, double *variance);

// # Safety
// `m` must be null or a handle from this library not yet freed.
void mq_measure_free(struct MqMeasure *m);

// Boundary angles and diameter cut for the circle model with `n1` points
// on the upper arc, `n2` on the lower arc and `k` interior diameter points,
// plus the resulting distortion.
//
// # Safety
// All output pointers must be writable.
enum MqStatus mq_circle_boundaries(size_t n1,
                                   size_t n2,
                                   size_t k,
                                   double *a,
                                   double *b,
                                   double *c,
                                   double *distortion);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MIXQUANT_H */

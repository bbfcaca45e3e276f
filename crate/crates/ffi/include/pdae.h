#ifndef PDAE_H
#define PDAE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum PdaeStatus {
  PDAE_STATUS_OK = 0,
  PDAE_STATUS_INVALID_ARGUMENT = 1,
  PDAE_STATUS_NULL_POINTER = 2,
  PDAE_STATUS_SINGULAR = 3,
  PDAE_STATUS_NO_CONVERGENCE = 4,
  PDAE_STATUS_DEGENERATE_POLYNOMIAL = 5,
  PDAE_STATUS_SINGULAR_PENCIL = 6,
  PDAE_STATUS_PRECONDITION = 7,
  PDAE_STATUS_SINGULAR_CELL = 8,
  PDAE_STATUS_INSTABILITY = 9,
  PDAE_STATUS_UNSUPPORTED = 10,
  PDAE_STATUS_PANIC = 11,
} PdaeStatus;

/**
 * Marching policy passed to [`pdae_solve`].
 */
typedef enum PdaeStride {
  PDAE_STRIDE_UNIT = 0,
  PDAE_STRIDE_BLOCK = 1,
} PdaeStride;

/**
 * Opaque problem handle.
 */
typedef struct PdaeProblem PdaeProblem;

/**
 * Opaque solution handle.
 */
typedef struct PdaeSolution PdaeSolution;

/**
 * Fills the row-major `n × n` matrix at `(x, t)`.
 */
typedef void (*PdaeMatrixFn)(double x, double t, double *out, void *user_data);

/**
 * Fills the `n`-vector at `(x, t)`.
 */
typedef void (*PdaeVectorFn)(double x, double t, double *out, void *user_data);

/**
 * Fills the `n`-vector at `s`.
 */
typedef void (*PdaeCurveFn)(double s, double *out, void *user_data);

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until
 * the next call into the library on the same thread.
 */
const char *pdae_last_error_message(void);

/**
 * Static, NUL-terminated name of a status code.
 */
const char *pdae_status_name(enum PdaeStatus status);

/**
 * Creates a built-in problem: `"1"`, `"2"`, `"demo"` or `"singular"`.
 *
 * # Safety
 * Pointer arguments must be null or valid for the documented access.
 */
enum PdaeStatus pdae_problem_new_example(const char *name, struct PdaeProblem **out);

/**
 * Creates a problem of order `n` from callbacks. `exact` may be null.
 * `user_data` is passed through to every callback and must outlive the
 * problem.
 *
 * # Safety
 * Pointer arguments must be null or valid for the documented access.
 */
enum PdaeStatus pdae_problem_new_callbacks(size_t n,
                                           PdaeMatrixFn a,
                                           PdaeMatrixFn b,
                                           PdaeMatrixFn c,
                                           PdaeVectorFn f,
                                           PdaeCurveFn psi,
                                           PdaeCurveFn phi,
                                           PdaeVectorFn exact,
                                           void *user_data,
                                           struct PdaeProblem **out);

/**
 * Order `n` of the system, or 0 for a null handle.
 *
 * # Safety
 * Pointer arguments must be null or valid for the documented access.
 */
size_t pdae_problem_order(const struct PdaeProblem *problem);

/**
 * Releases a problem. Null is ignored.
 *
 * # Safety
 * Pointer arguments must be null or valid for the documented access.
 */
void pdae_problem_free(struct PdaeProblem *problem);

/**
 * Solves `problem` on `[x0, x_end] × [t0, t_end]` with steps `h`, `tau`
 * and degrees `m1`, `m2`.
 *
 * # Safety
 * Pointer arguments must be null or valid for the documented access.
 */
enum PdaeStatus pdae_solve(const struct PdaeProblem *problem,
                           double x0,
                           double x_end,
                           double t0,
                           double t_end,
                           double h,
                           double tau,
                           size_t m1,
                           size_t m2,
                           enum PdaeStride stride,
                           struct PdaeSolution **out);

/**
 * Step counts `n1`, `n2` and system order `n`; nodes are `(n1+1) × (n2+1)`.
 *
 * # Safety
 * Pointer arguments must be null or valid for the documented access.
 */
enum PdaeStatus pdae_solution_dims(const struct PdaeSolution *solution,
                                   size_t *n1,
                                   size_t *n2,
                                   size_t *n);

/**
 * Copies the `n` components at node `(i, j)` into `out`.
 *
 * # Safety
 * Pointer arguments must be null or valid for the documented access.
 */
enum PdaeStatus pdae_solution_value(const struct PdaeSolution *solution,
                                    size_t i,
                                    size_t j,
                                    double *out);

/**
 * Max-norm error against the exact solution; `Unsupported` without one.
 *
 * # Safety
 * Pointer arguments must be null or valid for the documented access.
 */
enum PdaeStatus pdae_solution_delta_u(const struct PdaeSolution *solution, double *out);

/**
 * Largest absolute solution component, or NaN for a null handle.
 *
 * # Safety
 * Pointer arguments must be null or valid for the documented access.
 */
double pdae_solution_max_norm(const struct PdaeSolution *solution);

/**
 * Number of cell systems solved, or 0 for a null handle.
 *
 * # Safety
 * Pointer arguments must be null or valid for the documented access.
 */
size_t pdae_solution_cells(const struct PdaeSolution *solution);

/**
 * Releases a solution. Null is ignored.
 *
 * # Safety
 * Pointer arguments must be null or valid for the documented access.
 */
void pdae_solution_free(struct PdaeSolution *solution);

/**
 * Differentiation weight `H(m, s, l)`.
 *
 * # Safety
 * Pointer arguments must be null or valid for the documented access.
 */
enum PdaeStatus pdae_stencil_weight(size_t m, size_t s, size_t l, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PDAE_H */

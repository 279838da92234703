#ifndef SYMSEP_H
#define SYMSEP_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SymsepStatus {
  SYMSEP_STATUS_OK = 0,
  SYMSEP_STATUS_NULL_POINTER = 1,
  SYMSEP_STATUS_INVALID_ARGUMENT = 2,
  /**
   * Input matrix is not a density matrix (non-Hermitian, bad trace or not PSD).
   */
  SYMSEP_STATUS_NOT_A_STATE = 3,
  /**
   * The operation does not apply to this kind of state.
   */
  SYMSEP_STATUS_NOT_APPLICABLE = 4,
  /**
   * A numerical precondition failed (e.g. no sign change in a threshold scan).
   */
  SYMSEP_STATUS_NUMERICAL = 5,
  SYMSEP_STATUS_IO = 6,
  SYMSEP_STATUS_BUFFER_TOO_SMALL = 7,
  SYMSEP_STATUS_PANIC = 8,
} SymsepStatus;

typedef enum SymsepCriterion {
  SYMSEP_CRITERION_ETA_PSD = 0,
  SYMSEP_CRITERION_PPT = 1,
  SYMSEP_CRITERION_CCNR = 2,
  SYMSEP_CRITERION_CORR_PSD = 3,
  SYMSEP_CRITERION_COV_NORM = 4,
  SYMSEP_CRITERION_COV_DIAG = 5,
} SymsepCriterion;

typedef enum SymsepFamily {
  /**
   * `breuer(d, lambda)`
   */
  SYMSEP_FAMILY_BREUER = 0,
  /**
   * `embed_symmetric(D, d, lambda)`
   */
  SYMSEP_FAMILY_EMBED_SYMMETRIC = 1,
} SymsepFamily;

typedef enum SymsepExtensionStatus {
  SYMSEP_EXTENSION_STATUS_FEASIBLE = 0,
  SYMSEP_EXTENSION_STATUS_INFEASIBLE_EVIDENCE = 1,
  SYMSEP_EXTENSION_STATUS_INCONCLUSIVE = 2,
} SymsepExtensionStatus;

/**
 * Bipartite or multipartite density matrix in the computational basis.
 */
typedef struct SymsepDensity SymsepDensity;

/**
 * Symmetric `N`-qubit state in the Dicke basis.
 */
typedef struct SymsepSymmetric SymsepSymmetric;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *symsep_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *symsep_version(void);

/**
 * Builds a computational-basis state from `side x side` row-major arrays,
 * `side` being the product of `dims`. `im` may be null for a real matrix.
 *
 * # Safety
 * `re` (and `im` if non-null) must hold `side * side` doubles; `dims` must
 * hold `ndims` entries; `out` must be writable.
 */
enum SymsepStatus symsep_density_new(const double *re,
                                     const double *im,
                                     const size_t *dims,
                                     size_t ndims,
                                     struct SymsepDensity **out_state);

/**
 * # Safety
 * `state` must come from this library and not be freed twice; null is ignored.
 */
void symsep_density_free(struct SymsepDensity *state);

/**
 * Matrix side length, or 0 for a null handle.
 *
 * # Safety
 * `state` must be null or a live handle.
 */
size_t symsep_density_side(const struct SymsepDensity *state);

/**
 * Copies the matrix into `re`/`im` (each at least `len` entries; `im` may be
 * null).
 *
 * # Safety
 * `state` must be a live handle and the buffers must hold `len` doubles.
 */
enum SymsepStatus symsep_density_matrix(const struct SymsepDensity *state,
                                        double *re,
                                        double *im,
                                        size_t len);

/**
 * # Safety
 * `out_state` must be writable.
 */
enum SymsepStatus symsep_breuer(size_t d, double lambda, struct SymsepDensity **out_state);

/**
 * # Safety
 * `out_state` must be writable.
 */
enum SymsepStatus symsep_embed_symmetric(size_t big_d,
                                         size_t d,
                                         double lambda,
                                         struct SymsepDensity **out_state);

/**
 * Embeds an invariant bipartite state into a symmetric one of twice the
 * local dimension.
 *
 * # Safety
 * `state` must be a live handle; `out_state` must be writable.
 */
enum SymsepStatus symsep_embed_invariant(const struct SymsepDensity *state,
                                         struct SymsepDensity **out_state);

/**
 * Evaluates one criterion on a bipartite state. `margin` is negative when
 * violated; `satisfied` is 1 when `margin >= -tol`.
 *
 * # Safety
 * `state` must be a live handle; `margin` and `satisfied` must be writable
 * (`satisfied` may be null).
 */
enum SymsepStatus symsep_criterion(const struct SymsepDensity *state,
                                   enum SymsepCriterion criterion,
                                   double tol,
                                   double *margin,
                                   int32_t *satisfied);

/**
 * Minimum eigenvalue of the partial transpose over the listed subsystems.
 *
 * # Safety
 * `state` must be a live handle, `subset` must hold `n` entries and `out`
 * must be writable.
 */
enum SymsepStatus symsep_ppt_margin(const struct SymsepDensity *state,
                                    const size_t *subset,
                                    size_t n,
                                    double *out_margin);

/**
 * Largest `lambda` in `[lo, hi]` at which the family is PPT across the
 * first subsystem. `big_d` is ignored for [`SymsepFamily::Breuer`].
 *
 * # Safety
 * `out_lambda` must be writable.
 */
enum SymsepStatus symsep_ppt_threshold(enum SymsepFamily family,
                                       size_t d,
                                       size_t big_d,
                                       double lo,
                                       double hi,
                                       double *out_lambda);

/**
 * Builds an `N`-qubit symmetric state from `(N+1) x (N+1)` Dicke-basis
 * arrays. `im` may be null.
 *
 * # Safety
 * `re` (and `im` if non-null) must hold `(qubits+1)^2` doubles; `out_state`
 * must be writable.
 */
enum SymsepStatus symsep_symmetric_new(const double *re,
                                       const double *im,
                                       size_t qubits,
                                       struct SymsepSymmetric **out_state);

/**
 * The published four-qubit (`which = 4`) or five-qubit (`which = 5`) state.
 *
 * # Safety
 * `out_state` must be writable.
 */
enum SymsepStatus symsep_bound_entangled(uint32_t which, struct SymsepSymmetric **out_state);

/**
 * # Safety
 * `state` must come from this library and not be freed twice; null is ignored.
 */
void symsep_symmetric_free(struct SymsepSymmetric *state);

/**
 * Qubit count, or 0 for a null handle.
 *
 * # Safety
 * `state` must be null or a live handle.
 */
size_t symsep_symmetric_qubits(const struct SymsepSymmetric *state);

/**
 * Copies the `(N+1)^2` Dicke-basis entries into `re`/`im` (`im` may be null).
 *
 * # Safety
 * `state` must be a live handle and the buffers must hold `len` doubles.
 */
enum SymsepStatus symsep_symmetric_matrix(const struct SymsepSymmetric *state,
                                          double *re,
                                          double *im,
                                          size_t len);

/**
 * Minimum eigenvalue of the partial transpose across the `a : b` split.
 *
 * # Safety
 * `state` must be a live handle; `out_min` must be writable.
 */
enum SymsepStatus symsep_split_pt_min(const struct SymsepSymmetric *state,
                                      size_t a,
                                      size_t b,
                                      double *out_min);

/**
 * Smallest nonstructural partial-transpose eigenvalue over all splits,
 * skipping the balanced one when `exclude_balanced` is nonzero. Infinity
 * when no split remains.
 *
 * # Safety
 * `state` must be a live handle; `out_min` must be writable.
 */
enum SymsepStatus symsep_lambda_min(const struct SymsepSymmetric *state,
                                    int32_t exclude_balanced,
                                    double *out_min);

/**
 * The state as a bipartite `(a+1) x (b+1)` computational-basis state.
 *
 * # Safety
 * `state` must be a live handle; `out_state` must be writable.
 */
enum SymsepStatus symsep_to_bipartite(const struct SymsepSymmetric *state,
                                      size_t a,
                                      size_t b,
                                      struct SymsepDensity **out_state);

/**
 * Searches for a PPT symmetric extension to `extension_qubits` qubits.
 * Pass `max_iter = 0` or `tol <= 0` for the defaults. When the search
 * succeeds and `out_witness` is non-null, the extension is returned there
 * (otherwise it is set to null).
 *
 * # Safety
 * `state` must be a live handle; `out_status` and `out_gap` must be
 * writable; `out_witness` may be null.
 */
enum SymsepStatus symsep_find_extension(const struct SymsepSymmetric *state,
                                        size_t extension_qubits,
                                        size_t max_iter,
                                        double tol,
                                        enum SymsepExtensionStatus *out_status,
                                        double *out_gap,
                                        struct SymsepSymmetric **out_witness);

/**
 * Checks that `candidate` is a PPT symmetric extension of `target` within
 * `tol`. Writes 1 or 0 to `out_ok`.
 *
 * # Safety
 * Both handles must be live; `out_ok` must be writable.
 */
enum SymsepStatus symsep_verify_extension(const struct SymsepSymmetric *candidate,
                                          const struct SymsepSymmetric *target,
                                          double tol,
                                          int32_t *out_ok);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SYMSEP_H */

#ifndef SURROGATE_REGRET_H
#define SURROGATE_REGRET_H

/* Generated with cbindgen:0.27.0 */

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define SR_FAMILY_HINGE 0

#define SR_FAMILY_SQUARED 1

#define SR_FAMILY_EXPONENTIAL 2

#define SR_FAMILY_SIGMOID 3

/**
 * Result code of every exported function.
 */
typedef enum SrStatus {
  SR_STATUS_OK = 0,
  SR_STATUS_NULL_POINTER = 1,
  SR_STATUS_DOMAIN = 2,
  SR_STATUS_INVALID = 3,
  SR_STATUS_UNSUPPORTED_LIMIT = 4,
  SR_STATUS_PRECONDITION = 5,
  SR_STATUS_UNSUPPORTED = 6,
  SR_STATUS_VACUOUS_BOUND = 7,
  SR_STATUS_INCONSISTENT = 8,
  SR_STATUS_PANIC = 9,
} SrStatus;

/**
 * Opaque loss handle.
 */
typedef struct SrLoss SrLoss;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Builds the uneven margin loss `φ(t)`, `β φ(−γ t)` of a family.
 * `alpha_weight` may be null for the unweighted loss.
 *
 * # Safety
 * `alpha_weight` must be null or point to a readable double; `out` must be
 * valid for writes.
 */
enum SrStatus sr_loss_uneven_new(int32_t family,
                                 double beta,
                                 double gamma,
                                 const double *alpha_weight,
                                 struct SrLoss **out);

/**
 * Builds the cost-sensitive 0-1 loss for cost `alpha`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum SrStatus sr_loss_cost_sensitive_new(double alpha, struct SrLoss **out);

/**
 * Builds the α-weighted version of `loss` as a new handle.
 *
 * # Safety
 * `loss` must be null or a live handle; `out` must be valid for writes.
 */
enum SrStatus sr_loss_alpha_transform(const struct SrLoss *loss, double alpha, struct SrLoss **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `loss` must be null or a live handle not used afterwards.
 */
void sr_loss_free(struct SrLoss *loss);

/**
 * `C_L(η, t)`; `t` may be `±INFINITY` when the loss declares those limits.
 *
 * # Safety
 * `loss` must be null or a live handle; `out` must be valid for writes.
 */
enum SrStatus sr_conditional_risk(const struct SrLoss *loss, double eta, double t, double *out);

/**
 * `C*_L(η)`.
 *
 * # Safety
 * `loss` must be null or a live handle; `out` must be valid for writes.
 */
enum SrStatus sr_optimal_conditional_risk(const struct SrLoss *loss, double eta, double *out);

/**
 * `C⁻_{L,α}(η)`, the best risk among scores on the wrong side of `α`.
 *
 * # Safety
 * `loss` must be null or a live handle; `out` must be valid for writes.
 */
enum SrStatus sr_constrained_optimal_risk(const struct SrLoss *loss,
                                          double alpha,
                                          double eta,
                                          double *out);

/**
 * `H_{L,α}(η)`.
 *
 * # Safety
 * `loss` must be null or a live handle; `out` must be valid for writes.
 */
enum SrStatus sr_h_alpha(const struct SrLoss *loss, double alpha, double eta, double *out);

/**
 * Decides calibration for `alpha`. On `SR_STATUS_OK`, `*out_calibrated` is
 * set and, when `out_witness_eta` is non-null, the first witness `η` is
 * stored there (NaN when the report has none).
 *
 * # Safety
 * `loss` must be null or a live handle; `out_calibrated` must be valid for
 * writes; `out_witness_eta` must be null or valid for writes.
 */
enum SrStatus sr_check_calibrated(const struct SrLoss *loss,
                                  double alpha,
                                  bool *out_calibrated,
                                  double *out_witness_eta);

/**
 * Largest cost-sensitive regret compatible with `surrogate_regret`, from a
 * transfer function sampled on `grid` points. Returns
 * `SR_STATUS_VACUOUS_BOUND` when the loss is not calibrated for `alpha`.
 *
 * # Safety
 * `loss` must be null or a live handle; `out` must be valid for writes.
 */
enum SrStatus sr_regret_bound(const struct SrLoss *loss,
                              double alpha,
                              double surrogate_regret,
                              size_t grid,
                              double *out);

/**
 * Calibrating cost `α(γ)` of the sigmoid family with `β = 1/γ`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum SrStatus sr_alpha_of_gamma(double gamma, double tol, double *out);

/**
 * Finite minimizer `t₋(η)` of the `γ = 2` sigmoid loss for `η ∈ (0, 1/2)`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum SrStatus sr_sigmoid_t_minus(double eta, double *out);

/**
 * Copies the calling thread's last error message into `buf` (truncated and
 * nul-terminated when `len > 0`). Returns the full message length in bytes,
 * excluding the terminator; 0 when no error has been recorded.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes of writes.
 */
size_t sr_last_error_message(char *buf, size_t len);

/**
 * Static, nul-terminated name of a status code; `"unknown"` for values
 * outside the enum.
 */
const char *sr_status_name(int32_t status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SURROGATE_REGRET_H */

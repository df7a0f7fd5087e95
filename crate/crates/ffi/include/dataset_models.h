#ifndef DATASET_MODELS_H
#define DATASET_MODELS_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. Zero is success.
 */
typedef enum DsmStatus {
  DSM_STATUS_OK = 0,
  DSM_STATUS_NULL_POINTER = 1,
  DSM_STATUS_SHAPE = 2,
  DSM_STATUS_INVALID_INPUT = 3,
  DSM_STATUS_DOMAIN = 4,
  DSM_STATUS_NON_CONVERGENCE = 5,
  DSM_STATUS_UNBOUNDED = 6,
  DSM_STATUS_DEGENERATE = 7,
  DSM_STATUS_CANONICALITY = 8,
  DSM_STATUS_UNSUPPORTED = 9,
  DSM_STATUS_INFEASIBLE = 10,
  DSM_STATUS_TRUNCATION = 11,
  DSM_STATUS_PANIC = 12,
  DSM_STATUS_OTHER = 13,
} DsmStatus;

/**
 * Opaque model handle.
 */
typedef struct DsmModel DsmModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread, NUL-terminated and
 * truncated to `capacity`, into `buf`. Returns the length of the full
 * message excluding the terminator.
 *
 * # Safety
 * `buf` must point to `capacity` writable bytes or be null.
 */
size_t dsm_last_error_message(char *buf, size_t capacity);

/**
 * Qubit model; energies `U` with `|U| < 1 − margin`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum DsmStatus dsm_qubit_new(double margin, struct DsmModel **out);

/**
 * Phase-space model on wave functions truncated at `nmax` quanta.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum DsmStatus dsm_coherent_new(double r, double hbar, size_t nmax, struct DsmModel **out);

/**
 * Exponential family on `alphabet` symbols with `dim` energy functions
 * given row-major in `hamiltonians`. A null `prior` means the unit prior.
 *
 * # Safety
 * `prior` must hold `alphabet` values or be null; `hamiltonians` must hold
 * `dim * alphabet` values; `out` must be a valid pointer.
 */
enum DsmStatus dsm_discrete_new(const double *prior,
                                const double *hamiltonians,
                                size_t dim,
                                size_t alphabet,
                                struct DsmModel **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `m` must come from a `dsm_*_new` function and not be used afterwards.
 */
void dsm_model_free(struct DsmModel *m);

/**
 * Number of parameters θ (and energies U) of the model; 0 for null.
 *
 * # Safety
 * `m` must be a valid handle or null.
 */
size_t dsm_model_dim(const struct DsmModel *m);

/**
 * Φ(θ).
 *
 * # Safety
 * Pointers must be valid for the given lengths.
 */
enum DsmStatus dsm_massieu(const struct DsmModel *m, const double *theta, size_t len, double *out);

/**
 * U(θ) = −∇Φ(θ).
 *
 * # Safety
 * Pointers must be valid for the given lengths.
 */
enum DsmStatus dsm_theta_to_u(const struct DsmModel *m,
                              const double *theta,
                              size_t len,
                              double *u_out,
                              size_t u_len);

/**
 * θ(U) = ∇S(U).
 *
 * # Safety
 * Pointers must be valid for the given lengths.
 */
enum DsmStatus dsm_u_to_theta(const struct DsmModel *m,
                              const double *u,
                              size_t len,
                              double *theta_out,
                              size_t theta_len);

/**
 * S(U).
 *
 * # Safety
 * Pointers must be valid for the given lengths.
 */
enum DsmStatus dsm_entropy(const struct DsmModel *m, const double *u, size_t len, double *out);

/**
 * θ whose model reproduces the energies `u`.
 *
 * # Safety
 * Pointers must be valid for the given lengths.
 */
enum DsmStatus dsm_maxent_fit(const struct DsmModel *m,
                              const double *u,
                              size_t len,
                              double *theta_out,
                              size_t theta_len);

/**
 * Hessian of Φ at θ, row-major into `out` of length `len * len`.
 *
 * # Safety
 * Pointers must be valid for the given lengths.
 */
enum DsmStatus dsm_metric(const struct DsmModel *m,
                          const double *theta,
                          size_t len,
                          double *out,
                          size_t out_len);

/**
 * Bregman divergence of m_θ from m_ζ.
 *
 * # Safety
 * Pointers must be valid for the given lengths.
 */
enum DsmStatus dsm_bregman(const struct DsmModel *m,
                           const double *theta,
                           const double *zeta,
                           size_t len,
                           double *out);

/**
 * `|Φ(θ) − S(U(θ)) + θ·U(θ)|`.
 *
 * # Safety
 * Pointers must be valid for the given lengths.
 */
enum DsmStatus dsm_canonical_residual(const struct DsmModel *m,
                                      const double *theta,
                                      size_t len,
                                      double *out);

/**
 * Divergence of a data set from m_θ. The data set is a probability
 * vector (discrete), a Bloch vector (qubit) or interleaved real and
 * imaginary Fock amplitudes of length `2 * (nmax + 1)` (coherent).
 *
 * # Safety
 * Pointers must be valid for the given lengths.
 */
enum DsmStatus dsm_divergence(const struct DsmModel *m,
                              const double *data,
                              size_t data_len,
                              const double *theta,
                              size_t theta_len,
                              double *out);

/**
 * Least-squares line `y = a·x + b` and entropy of `n` pairs.
 *
 * # Safety
 * `x`, `y` must hold `n` values; out pointers must be valid.
 */
enum DsmStatus dsm_regression(const double *x,
                              const double *y,
                              size_t n,
                              double *a_out,
                              double *b_out,
                              double *entropy_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DATASET_MODELS_H */

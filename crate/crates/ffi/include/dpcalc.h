#ifndef DPCALC_H
#define DPCALC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Status codes.
 */
typedef enum {
  DPC_STATUS_OK = 0,
  DPC_STATUS_INVALID_PARAMETER = 1,
  /**
   * A named inequality on the inputs does not hold, e.g. `theta - q > 0`.
   */
  DPC_STATUS_PRECONDITION = 2,
  DPC_STATUS_DOMAIN = 3,
  DPC_STATUS_PARSE = 4,
  DPC_STATUS_UNKNOWN_CHECK = 5,
  DPC_STATUS_IO = 6,
  DPC_STATUS_NULL_POINTER = 7,
  DPC_STATUS_INVALID_UTF8 = 8,
  /**
   * A Rust panic was caught at the boundary.
   */
  DPC_STATUS_INTERNAL = 9,
} DpcStatus;

/**
 * Which random measure [`dpc_sample_functional`] draws.
 */
typedef enum {
  /**
   * `P(g)` for `P ~ Dirichlet(θH)`.
   */
  DPC_PROCESS_DIRICHLET = 0,
  /**
   * `μ(g)` for the Gamma process with shape `θH`.
   */
  DPC_PROCESS_GAMMA = 1,
  /**
   * `μ(g)` for the Beta-Gamma process with shape `θH` and parameter `d`.
   */
  DPC_PROCESS_BETA_GAMMA = 2,
} DpcProcess;

/**
 * A functional `g`.
 */
typedef struct DpcFunctional DpcFunctional;

/**
 * A shape measure `θH`.
 */
typedef struct DpcShape DpcShape;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null if none.
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *dpc_last_error(void);

/**
 * Builds the shape `θH` from a base-measure expression such as
 * `"0.5*delta(0)+0.5*delta(1)"` or `"uniform(0,1)"`.
 *
 * # Safety
 * `base` must be a NUL-terminated string; `out` must be writable.
 */
DpcStatus dpc_shape_new(double theta, const char *base, DpcShape **out);

/**
 * # Safety
 * `shape` must come from [`dpc_shape_new`] and not be freed twice. Null is ignored.
 */
void dpc_shape_free(DpcShape *shape);

/**
 * Builds a functional from an expression such as `"id"` or `"indicator(0.5,1.5)"`.
 *
 * # Safety
 * `spec` must be a NUL-terminated string; `out` must be writable.
 */
DpcStatus dpc_functional_new(const char *spec, DpcFunctional **out);

/**
 * # Safety
 * `g` must come from [`dpc_functional_new`] and not be freed twice. Null is ignored.
 */
void dpc_functional_free(DpcFunctional *g);

/**
 * `ψ(z) = θ E_H[log(1 + z g)]`.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
DpcStatus dpc_psi(const DpcShape *shape, const DpcFunctional *g, double z, double *out);

/**
 * Gamma-process Laplace functional `exp(-ψ(z))`.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
DpcStatus dpc_laplace_gamma(const DpcShape *shape, const DpcFunctional *g, double z, double *out);

/**
 * Order-`q` transform `E[(1 + zP(g))^{-q}]` by the Beta(q, θ-q) mixture; needs `θ ≥ q`.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
DpcStatus dpc_cs_eq15(const DpcShape *shape,
                      const DpcFunctional *g,
                      double z,
                      double q,
                      size_t quad_order,
                      double *out);

/**
 * Order-one transform `E[(1 + zP(g))^{-1}]` for any `θ > 0`.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
DpcStatus dpc_cs_eq17(const DpcShape *shape,
                      const DpcFunctional *g,
                      double z,
                      size_t quad_order,
                      double *out);

/**
 * Order-`q` transform by the exact depth-`n` partition expansion; needs
 * `θ + n - q > 0` and a base measure without atoms.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
DpcStatus dpc_cs_partition_expansion(const DpcShape *shape,
                                     const DpcFunctional *g,
                                     double z,
                                     double q,
                                     size_t n,
                                     size_t quad_order,
                                     double *out);

/**
 * Monte Carlo `E[(1 + zP(g))^{-q}]` over `n_samples` stick-breaking draws.
 *
 * # Safety
 * Handles must be live; `mean` and `std_error` must be writable.
 */
DpcStatus dpc_cs_transform_mc(const DpcShape *shape,
                              const DpcFunctional *g,
                              double z,
                              double q,
                              size_t n_samples,
                              double eps,
                              uint64_t seed,
                              double *mean,
                              double *std_error);

/**
 * Monte Carlo `E[exp(-z μ(g))]` for the Beta-Gamma process `(θH, d)`.
 *
 * # Safety
 * Handles must be live; `mean` and `std_error` must be writable.
 */
DpcStatus dpc_bg_laplace_mc(const DpcShape *shape,
                            double d,
                            const DpcFunctional *g,
                            double z,
                            size_t n_samples,
                            double eps,
                            uint64_t seed,
                            double *mean,
                            double *std_error);

/**
 * Fills `out[0..n]` with independent draws of the functional of `process`.
 * `d` is used only for [`DpcProcess::BetaGamma`].
 *
 * # Safety
 * Handles must be live; `out` must have room for `n` doubles.
 */
DpcStatus dpc_sample_functional(const DpcShape *shape,
                                const DpcFunctional *g,
                                DpcProcess process,
                                double d,
                                double eps,
                                uint64_t seed,
                                size_t n,
                                double *out);

/**
 * Parses and runs a TOML config. On success `*reports` holds one JSON
 * record per line and `*all_pass` tells whether every check passed.
 *
 * # Safety
 * `config` must be a NUL-terminated string; out-pointers must be writable.
 */
DpcStatus dpc_run_config(const char *config, char **reports, bool *all_pass);

/**
 * One `name  summary` line per registered check.
 *
 * # Safety
 * `out` must be writable.
 */
DpcStatus dpc_list_checks(char **out);

/**
 * # Safety
 * `s` must come from this library and not be freed twice. Null is ignored.
 */
void dpc_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DPCALC_H */

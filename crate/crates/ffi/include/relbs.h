#ifndef RELBS_H
#define RELBS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stddef.h>
#include <stdint.h>
#include <stdbool.h>

/**
 * Result codes shared by every entry point.
 */
typedef enum RelbsStatus {
  RELBS_STATUS_OK = 0,
  /**
   * An argument is outside the domain of the function.
   */
  RELBS_STATUS_DOMAIN = 1,
  RELBS_STATUS_OVERFLOW = 2,
  RELBS_STATUS_SINGULAR = 3,
  RELBS_STATUS_ILL_CONDITIONED = 4,
  /**
   * Quadrature did not reach its tolerance.
   */
  RELBS_STATUS_NO_CONVERGENCE = 5,
  RELBS_STATUS_NON_FINITE = 6,
  /**
   * Malformed input data.
   */
  RELBS_STATUS_INPUT = 7,
  RELBS_STATUS_NULL_POINTER = 8,
  /**
   * No volatility reproduces the price.
   */
  RELBS_STATUS_NO_SOLUTION = 9,
  RELBS_STATUS_PANIC = 10,
} RelbsStatus;

/**
 * Values accepted by the `kind` argument.
 */
typedef enum RelbsOptionKind {
  RELBS_OPTION_KIND_CALL = 0,
  RELBS_OPTION_KIND_PUT = 1,
} RelbsOptionKind;

/**
 * Market, maximal speed and quadrature tolerance. Opaque to C.
 */
typedef struct RelbsModel RelbsModel;

typedef struct RelbsPriceBreakdown {
  double atom_contribution;
  double continuous_contribution;
  double total;
  double quad_error;
} RelbsPriceBreakdown;

typedef struct RelbsMcEstimate {
  double mean;
  /**
   * NaN when a single path gives no spread estimate.
   */
  double std_error;
  uint64_t n_paths;
  uint64_t seed;
} RelbsMcEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null after a
 * success. Valid until the next call into this library on the same thread.
 */
const char *relbs_last_error(void);

/**
 * Creates a model. `rel_tol` is the relative quadrature tolerance; pass 0
 * for the default of 1e-9. Release with [`relbs_model_free`].
 *
 * # Safety
 * `out` must be valid for a pointer write.
 */
enum RelbsStatus relbs_model_new(double spot,
                                 double rate,
                                 double sigma,
                                 double tau,
                                 double c_m,
                                 double rel_tol,
                                 struct RelbsModel **out);

/**
 * Releases a model. Null is ignored.
 *
 * # Safety
 * `model` is null or came from [`relbs_model_new`] and was not yet freed.
 */
void relbs_model_free(struct RelbsModel *model);

/**
 * Black-Scholes price at the model volatility.
 *
 * # Safety
 * `model` is a live model and `out` is valid for writes.
 */
enum RelbsStatus relbs_bs_price(const struct RelbsModel *model,
                                uint32_t kind,
                                double strike,
                                double *out);

/**
 * Price under the telegraph law by quadrature.
 *
 * # Safety
 * `model` is a live model and `out` is valid for writes.
 */
enum RelbsStatus relbs_telegraph_price(const struct RelbsModel *model,
                                       uint32_t kind,
                                       double strike,
                                       struct RelbsPriceBreakdown *out);

/**
 * Black-Scholes price plus the closed-form `1/c_m²` correction.
 *
 * # Safety
 * `model` is a live model and `out` is valid for writes.
 */
enum RelbsStatus relbs_corrected_price(const struct RelbsModel *model,
                                       uint32_t kind,
                                       double strike,
                                       double *out);

/**
 * Black-Scholes implied volatility of `price`. The model volatility is
 * ignored. Returns `RELBS_STATUS_NO_SOLUTION` when no volatility in
 * `[1e-6, 5]` reproduces the price.
 *
 * # Safety
 * `model` is a live model and `out` is valid for writes.
 */
enum RelbsStatus relbs_implied_vol(const struct RelbsModel *model,
                                   uint32_t kind,
                                   double strike,
                                   double price,
                                   double *out);

/**
 * First-order implied volatility `σ(1 + v/(c_m² vega_bar))`.
 *
 * # Safety
 * `model` is a live model and `out` is valid for writes.
 */
enum RelbsStatus relbs_first_order_iv(const struct RelbsModel *model, double strike, double *out);

/**
 * Continuous part of the telegraph density of the log-displacement at
 * time `t`.
 *
 * # Safety
 * `model` is a live model and `out` is valid for writes.
 */
enum RelbsStatus relbs_density(const struct RelbsModel *model, double x, double t, double *out);

/**
 * Mass at each light-cone edge `±c_m t`.
 *
 * # Safety
 * `model` is a live model and `out` is valid for writes.
 */
enum RelbsStatus relbs_atom_weight(const struct RelbsModel *model, double t, double *out);

/**
 * Variance of the log-displacement at time `t`.
 *
 * # Safety
 * `model` is a live model and `out` is valid for writes.
 */
enum RelbsStatus relbs_variance(const struct RelbsModel *model, double t, double *out);

/**
 * Monte Carlo price from `n_paths` exact paths. Deterministic in `seed`.
 *
 * # Safety
 * `model` is a live model and `out` is valid for writes.
 */
enum RelbsStatus relbs_mc_price(const struct RelbsModel *model,
                                uint32_t kind,
                                double strike,
                                uint64_t n_paths,
                                uint64_t seed,
                                bool antithetic,
                                struct RelbsMcEstimate *out);

/**
 * Largest absolute log-return between consecutive `closes`. Writes the
 * index of the close ending that move and its signed log-return.
 *
 * # Safety
 * `closes` points to `len` doubles; the out pointers are valid for writes.
 */
enum RelbsStatus relbs_max_log_return(const double *closes,
                                      size_t len,
                                      size_t *out_index,
                                      double *out_log_return);

/**
 * `e^{-z} I0(z)` for `z >= 0`.
 *
 * # Safety
 * `out` is valid for writes.
 */
enum RelbsStatus relbs_bessel_i0_scaled(double z, double *out);

/**
 * `e^{-z} I1(z)` for `z >= 0`.
 *
 * # Safety
 * `out` is valid for writes.
 */
enum RelbsStatus relbs_bessel_i1_scaled(double z, double *out);

/**
 * Standard normal distribution function.
 *
 * # Safety
 * `out` is valid for writes.
 */
enum RelbsStatus relbs_norm_cdf(double z, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RELBS_H */

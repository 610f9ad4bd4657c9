#ifndef BEC_DESIGN_H
#define BEC_DESIGN_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Result code of every call.
 */
typedef enum BecStatus {
  BEC_STATUS_OK = 0,
  BEC_STATUS_NULL_POINTER = 1,
  BEC_STATUS_INVALID_ARGUMENT = 2,
  BEC_STATUS_INFEASIBLE = 3,
  BEC_STATUS_PARSE = 4,
  BEC_STATUS_IO = 5,
  BEC_STATUS_INTERNAL = 6,
  BEC_STATUS_PANIC = 7,
} BecStatus;

typedef enum BecDesignKind {
  BEC_DESIGN_KIND_TYPE_A = 0,
  BEC_DESIGN_KIND_TYPE_B = 1,
  BEC_DESIGN_KIND_TYPE_MB = 2,
} BecDesignKind;

/**
 * Opaque design handle.
 */
typedef struct BecDesign BecDesign;

/**
 * Opaque ensemble handle.
 */
typedef struct BecEnsemble BecEnsemble;

/**
 * Scalar summary of a design.
 */
typedef struct BecDesignInfo {
  size_t n;
  size_t dv;
  size_t p;
  double design_eps;
  double design_rate;
} BecDesignInfo;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL after a success.
 * Valid until the next call on the same thread.
 */
const char *bec_last_error_message(void);

/**
 * # Safety
 * `s` must come from this library and not be freed yet, or be NULL.
 */
void bec_string_free(char *s);

/**
 * Builds an ensemble from edge-perspective `(degree, coefficient)` arrays.
 *
 * # Safety
 * Each array must hold its stated number of elements; `out` must be writable.
 */
enum BecStatus bec_ensemble_new(const uint32_t *lambda_degrees,
                                const double *lambda_coeffs,
                                size_t lambda_len,
                                const uint32_t *rho_degrees,
                                const double *rho_coeffs,
                                size_t rho_len,
                                struct BecEnsemble **out);

/**
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum BecStatus bec_ensemble_from_json(const char *json, struct BecEnsemble **out);

/**
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum BecStatus bec_ensemble_load(const char *path, struct BecEnsemble **out);

/**
 * Serializes to JSON. Free the string with [`bec_string_free`].
 *
 * # Safety
 * `e` must be a live handle; `out` must be writable.
 */
enum BecStatus bec_ensemble_to_json(const struct BecEnsemble *e, char **out);

/**
 * # Safety
 * `e` must be a live handle; `path` a NUL-terminated string.
 */
enum BecStatus bec_ensemble_save(const struct BecEnsemble *e, const char *path);

/**
 * # Safety
 * `e` must come from this library and not be freed yet, or be NULL.
 */
void bec_ensemble_free(struct BecEnsemble *e);

/**
 * # Safety
 * `e` must be a live handle; `out` must be writable.
 */
enum BecStatus bec_ensemble_rate(const struct BecEnsemble *e, double *out);

/**
 * Copies the variable-side distribution. With `capacity` smaller than the
 * number of degrees only `len` is written.
 *
 * # Safety
 * `degrees` and `coeffs` must hold `capacity` elements (may be NULL when it is 0).
 */
enum BecStatus bec_ensemble_lambda(const struct BecEnsemble *e,
                                   uint32_t *degrees,
                                   double *coeffs,
                                   size_t capacity,
                                   size_t *len);

/**
 * Convergence test at `eps`. `margin` may be NULL.
 *
 * # Safety
 * `e` must be a live handle; `convergent` must be writable.
 */
enum BecStatus bec_ensemble_check(const struct BecEnsemble *e,
                                  double eps,
                                  bool *convergent,
                                  double *margin);

/**
 * Threshold by bisection; `tol <= 0` selects the default.
 *
 * # Safety
 * `e` must be a live handle; `out` must be writable.
 */
enum BecStatus bec_ensemble_threshold(const struct BecEnsemble *e, double tol, double *out);

/**
 * Highest-rate design at channel parameter `eps`. `p` is ignored for Type-A.
 *
 * # Safety
 * The `rho` arrays must hold `rho_len` elements; `out` must be writable.
 */
enum BecStatus bec_design_eps(const uint32_t *rho_degrees,
                              const double *rho_coeffs,
                              size_t rho_len,
                              double eps,
                              enum BecDesignKind kind,
                              size_t p,
                              struct BecDesign **out);

/**
 * Highest-threshold design at rate `rate`. `p` is ignored for Type-A.
 *
 * # Safety
 * The `rho` arrays must hold `rho_len` elements; `out` must be writable.
 */
enum BecStatus bec_design_rate(const uint32_t *rho_degrees,
                               const double *rho_coeffs,
                               size_t rho_len,
                               double rate,
                               enum BecDesignKind kind,
                               size_t p,
                               struct BecDesign **out);

/**
 * # Safety
 * `d` must be a live handle; `out` must be writable.
 */
enum BecStatus bec_design_info(const struct BecDesign *d, struct BecDesignInfo *out);

/**
 * New ensemble handle holding a copy of the design's ensemble.
 *
 * # Safety
 * `d` must be a live handle; `out` must be writable.
 */
enum BecStatus bec_design_ensemble(const struct BecDesign *d, struct BecEnsemble **out);

/**
 * # Safety
 * `d` must come from this library and not be freed yet, or be NULL.
 */
void bec_design_free(struct BecDesign *d);

/**
 * Writes `T_2, ..., T_{len+1}` of the check distribution into `out`.
 *
 * # Safety
 * The `rho` arrays must hold `rho_len` elements; `out` must hold `len`.
 */
enum BecStatus bec_taylor(const uint32_t *rho_degrees,
                          const double *rho_coeffs,
                          size_t rho_len,
                          double *out,
                          size_t len);

/**
 * Upper bounds for check-average degree `dc_bar`: threshold at `rate` and
 * rate at `eps`. Either output may be NULL.
 *
 * # Safety
 * Non-NULL outputs must be writable.
 */
enum BecStatus bec_bounds(double rate,
                          double eps,
                          double dc_bar,
                          double *threshold_bound,
                          double *rate_bound);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BEC_DESIGN_H */

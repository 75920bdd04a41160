#ifndef KOLMO_H
#define KOLMO_H

#include <stddef.h>
#include <stdint.h>

/*
 Sampling method for [`kolmo_sample`].
 */
typedef enum KolmoMethod {
  KOLMO_METHOD_SPECTRAL = 0,
  KOLMO_METHOD_PATHWISE = 1,
} KolmoMethod;

/*
 Status codes returned by every entry point.
 */
typedef enum KolmoStatus {
  KOLMO_STATUS_OK = 0,
  KOLMO_STATUS_DOMAIN = 1,
  KOLMO_STATUS_CAPACITY = 2,
  KOLMO_STATUS_SINGULAR_DENOMINATOR = 3,
  KOLMO_STATUS_INDEX = 4,
  KOLMO_STATUS_ILL_CONDITIONED = 5,
  KOLMO_STATUS_INVALID_ARGUMENT = 6,
  KOLMO_STATUS_INVARIANT = 7,
  KOLMO_STATUS_NULL_POINTER = 8,
  KOLMO_STATUS_PANIC = 9,
} KolmoStatus;

/*
 Exact coefficient row `b_{a,k}^0 ..= b_{a,k}^k`.
 */
typedef struct KolmoCoeffRow KolmoCoeffRow;

/*
 Sampled loop paths.
 */
typedef struct KolmoEnsemble KolmoEnsemble;

/*
 Exact Hankel system for one `N`.
 */
typedef struct KolmoHankel KolmoHankel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the most recent failure on this thread, or null. The pointer
 stays valid until the next failing call on the same thread.
 */
const char *kolmo_last_error_message(void);

/*
 Releases a string returned by this library. Null is ignored.

 # Safety
 `s` must come from this library and not have been freed already.
 */
void kolmo_string_free(char *s);

/*
 `P_n(x)` for any integer `n`; complex for `n < 0`.

 # Safety
 `out_re` and `out_im` must be valid for writes.
 */
enum KolmoStatus kolmo_legendre_p(int64_t n, double x, double *out_re, double *out_im);

/*
 `I_n(x)` for any integer `n`; complex for `n <= 0`.

 # Safety
 `out_re` and `out_im` must be valid for writes.
 */
enum KolmoStatus kolmo_legendre_i(int64_t n, double x, double *out_re, double *out_im);

/*
 Shifted Legendre polynomial `Q_n(t) = P_n(2t - 1)`.

 # Safety
 `result` must be valid for writes.
 */
enum KolmoStatus kolmo_shifted_q(uint32_t n, double t, double *result);

/*
 Covariance `C_N(s, t)`.

 # Safety
 `result` must be valid for writes.
 */
enum KolmoStatus kolmo_cov_cn(double s, double t, uint32_t n, double *result);

/*
 Rescaled kernel `R_N(x, y)`.

 # Safety
 `result` must be valid for writes.
 */
enum KolmoStatus kolmo_r_n(double x, double y, uint32_t n, double *result);

/*
 Diagonal `S_N(x)`.

 # Safety
 `result` must be valid for writes.
 */
enum KolmoStatus kolmo_s_n(double x, uint32_t n, double *result);

/*
 `dS_N/dx = -N·P_{N-1}(x)·P_N(x)`.

 # Safety
 `result` must be valid for writes.
 */
enum KolmoStatus kolmo_dsn_dx(double x, uint32_t n, double *result);

/*
 Exact moment `m_{p,q}^k` as two `"num/den"` strings (real and imaginary parts).

 # Safety
 `out_re` and `out_im` must be valid for writes; the returned strings are
 released with [`kolmo_string_free`].
 */
enum KolmoStatus kolmo_moment(int64_t p, int64_t q, uint32_t k, char **out_re, char **out_im);

/*
 Coefficient row `b_{a,k}^l`, `l = 0..=k`.

 # Safety
 `row` must be valid for writes; release the handle with [`kolmo_coeff_row_free`].
 */
enum KolmoStatus kolmo_pfd_coeffs(uint32_t a, uint32_t k, struct KolmoCoeffRow **row);

/*
 Number of entries in a coefficient row.

 # Safety
 `row` must be a live handle and `len` valid for writes.
 */
enum KolmoStatus kolmo_coeff_row_len(const struct KolmoCoeffRow *row, size_t *len);

/*
 Entry `l` of a coefficient row as a `"num/den"` string.

 # Safety
 `row` must be a live handle and `value` valid for writes.
 */
enum KolmoStatus kolmo_coeff_row_get(const struct KolmoCoeffRow *row, size_t l, char **value);

/*
 Entry `l` of a coefficient row rounded to `double`.

 # Safety
 `row` must be a live handle and `value` valid for writes.
 */
enum KolmoStatus kolmo_coeff_row_get_f64(const struct KolmoCoeffRow *row, size_t l, double *value);

/*
 # Safety
 `row` must come from [`kolmo_pfd_coeffs`] and not have been freed. Null is ignored.
 */
void kolmo_coeff_row_free(struct KolmoCoeffRow *row);

/*
 Builds the exact Hankel system for step `n` (at most 16).

 # Safety
 `system` must be valid for writes; release with [`kolmo_hankel_free`].
 */
enum KolmoStatus kolmo_hankel_build(uint32_t n, struct KolmoHankel **system);

/*
 Exact `Cov(Z_s, Z_t)` for rational `s = s_num/s_den`, `t = t_num/t_den`,
 as a `"num/den"` string.

 # Safety
 `system` must be a live handle and `value` valid for writes.
 */
enum KolmoStatus kolmo_hankel_cross_covariance(const struct KolmoHankel *system,
                                               int64_t s_num,
                                               int64_t s_den,
                                               int64_t t_num,
                                               int64_t t_den,
                                               char **value);

/*
 Exact `α_l(t)` for `1 <= l <= N` and rational `t`, as a `"num/den"` string.

 # Safety
 `system` must be a live handle and `value` valid for writes.
 */
enum KolmoStatus kolmo_hankel_alpha(const struct KolmoHankel *system,
                                    uint32_t l,
                                    int64_t t_num,
                                    int64_t t_den,
                                    char **value);

/*
 # Safety
 `system` must come from [`kolmo_hankel_build`] and not have been freed. Null is ignored.
 */
void kolmo_hankel_free(struct KolmoHankel *system);

/*
 Samples `r` loops of step `n` on the uniform grid with `m` intervals.

 # Safety
 `ensemble` must be valid for writes; release with [`kolmo_ensemble_free`].
 */
enum KolmoStatus kolmo_sample(enum KolmoMethod method,
                              uint32_t n,
                              uint32_t m,
                              uint32_t r,
                              uint64_t seed,
                              struct KolmoEnsemble **ensemble);

/*
 Number of paths and number of grid points (`M + 1`) per path.

 # Safety
 `ensemble` must be a live handle; `paths` and `points` valid for writes.
 */
enum KolmoStatus kolmo_ensemble_shape(const struct KolmoEnsemble *ensemble,
                                      size_t *paths,
                                      size_t *points);

/*
 Copies path `index` into `buffer`, which must hold `len >= M + 1` doubles.

 # Safety
 `ensemble` must be a live handle and `buffer` valid for `len` writes.
 */
enum KolmoStatus kolmo_ensemble_copy_path(const struct KolmoEnsemble *ensemble,
                                          size_t index,
                                          double *buffer,
                                          size_t len);

/*
 # Safety
 `ensemble` must come from [`kolmo_sample`] and not have been freed. Null is ignored.
 */
void kolmo_ensemble_free(struct KolmoEnsemble *ensemble);

/*
 Library version as a static NUL-terminated string.
 */
const char *kolmo_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KOLMO_H */

#ifndef ROUGHVAR_H
#define ROUGHVAR_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stddef.h>
#include <stdint.h>

#define RV_OK 0

// A required pointer argument was null.
#define RV_NULL_POINTER 2

// The library panicked; the handle graph is still consistent.
#define RV_PANIC 3

// A string argument was not valid UTF-8.
#define RV_BAD_STRING 4

#define RV_E_SEGMENT_TOO_LARGE 10

#define RV_E_PRIME_CAP 11

#define RV_E_SUPPORT_TOO_LARGE 12

#define RV_E_NOT_SQUAREFREE 13

#define RV_E_MODULUS_TOO_LARGE 14

#define RV_E_BUDGET_EXCEEDED 15

#define RV_E_OUT_OF_RANGE 16

#define RV_E_POLE 17

#define RV_E_UNSUPPORTED_REGIME 18

#define RV_E_RANGE_VIOLATED 19

#define RV_E_TRUNCATION 20

#define RV_E_INVALID_INPUT 21

#define RV_METHOD_DIRECT 0

#define RV_METHOD_CORRELATION 1

#define RV_FORMAT_CSV 0

#define RV_FORMAT_JSON 1

#define RV_FORMAT_TABLE 2

// Exact rational number.
typedef struct RvRational RvRational;

// Rendered-on-demand report table.
typedef struct RvReport RvReport;

// Message for the last failure on this thread, or NULL. Owned by the
// library; valid until the next failing call on the same thread.
const char *rv_last_error_message(void);

// Symbolic name of a status code; static storage.
const char *rv_status_name(int32_t code);

// # Safety
// `s` must be NULL or a string returned by this library, not yet freed.
void rv_string_free(char *s);

// # Safety
// `r` must be NULL or a live handle from this library.
void rv_rational_free(struct RvRational *r);

// `"p/q"` (or `"p"`); free with `rv_string_free`.
//
// # Safety
// `r` must be a live handle; `out` valid for one write.
int32_t rv_rational_to_string(const struct RvRational *r, char **out);

// Nearest double.
//
// # Safety
// `r` must be a live handle.
double rv_rational_to_f64(const struct RvRational *r);

// 1 if equal, 0 if not (or either is NULL).
//
// # Safety
// Both must be NULL or live handles.
int32_t rv_rational_equal(const struct RvRational *a, const struct RvRational *b);

// Exact main term `M(H, y)`.
//
// # Safety
// `out` must be valid for one write.
int32_t rv_main_term(uint64_t h, uint64_t y, int32_t method, struct RvRational **out);

// Exact `V(X, H, y)`; `threads = 0` means one.
//
// # Safety
// `out` must be valid for one write.
int32_t rv_variance_exact(uint64_t x,
                          uint64_t h,
                          uint64_t y,
                          uint32_t threads,
                          struct RvRational **out);

// Variance of totatives of `q` in windows of length `H`, by enumeration.
//
// # Safety
// `out` must be valid for one write.
int32_t rv_variance_mod_q(uint64_t q, uint64_t h, struct RvRational **out);

// The same variance from the closed form over divisors of `q`.
//
// # Safety
// `out` must be valid for one write.
int32_t rv_hausman_shapiro(uint64_t q, uint64_t h, struct RvRational **out);

// `Psi(x, y)`.
//
// # Safety
// `out` must be valid for one write.
int32_t rv_psi(uint64_t x, uint64_t y, uint64_t *out);

// Dickman `rho(u)`.
//
// # Safety
// `out` must be valid for one write.
int32_t rv_dickman_rho(double u, double *out);

// `lambda(u) = e^-gamma int_u^inf rho`.
//
// # Safety
// `out` must be valid for one write.
int32_t rv_lambda(double u, double *out);

// Saddle point `alpha(x, y)` given `log x`.
//
// # Safety
// `out` must be valid for one write.
int32_t rv_saddle_alpha(double log_x, uint64_t y, double *out);

// `zeta(re + i im)`.
//
// # Safety
// `out_re` and `out_im` must each be valid for one write.
int32_t rv_zeta(double re, double im, double *out_re, double *out_im);

// `I_c(x, y)` for `c` in `(1/2, 1)` through the residue relation.
//
// # Safety
// `out` must be valid for one write.
int32_t rv_contour_i(double x, uint64_t y, double c, double tolerance, double *out);

// `V(X, H, y) / M(H, y)` along `n_x` values of `X`. `force != 0` skips the
// range check.
//
// # Safety
// `xs` must point to `n_x` readable values; `out` valid for one write.
int32_t rv_report_converge(uint64_t h,
                           uint64_t y,
                           const uint64_t *xs,
                           uintptr_t n_x,
                           uint32_t threads,
                           int32_t force,
                           struct RvReport **out);

// Regime table for a grid written `"H:y,H:y,..."`.
//
// # Safety
// `grid` must be a NUL-terminated string; `out` valid for one write.
int32_t rv_report_regimes(const char *grid, uint32_t threads, struct RvReport **out);

// Number of rows.
//
// # Safety
// `r` must be NULL or a live handle.
uintptr_t rv_report_rows(const struct RvReport *r);

// Renders as `RV_FORMAT_CSV`, `RV_FORMAT_JSON` or `RV_FORMAT_TABLE`; free
// the string with `rv_string_free`.
//
// # Safety
// `r` must be a live handle; `out` valid for one write.
int32_t rv_report_render(const struct RvReport *r, int32_t format, char **out);

// # Safety
// `r` must be NULL or a live handle from this library.
void rv_report_free(struct RvReport *r);

#endif  /* ROUGHVAR_H */

#ifndef AZD_H
#define AZD_H

#include <stdbool.h>
#include <stdint.h>

// Result of every fallible call.
typedef enum AzdStatus {
  AZD_STATUS_OK = 0,
  // A required pointer argument was null.
  AZD_STATUS_NULL_POINTER = 1,
  // Text was not valid UTF-8 or did not parse.
  AZD_STATUS_PARSE_ERROR = 2,
  // Arguments were well formed but not acceptable.
  AZD_STATUS_INVALID_ARGUMENT = 3,
  // No telescoper exists within the search bounds.
  AZD_STATUS_NOT_FOUND = 4,
  // A numerical or exact computation failed.
  AZD_STATUS_COMPUTATION_FAILED = 5,
  // A Rust panic was caught at the boundary.
  AZD_STATUS_PANIC = 6,
} AzdStatus;

// An operator, certificate pair returned by [`azd_derive`].
typedef struct AzdResult AzdResult;

// A parsed integrand `F_n(x)`.
typedef struct AzdTerm AzdTerm;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failure on this thread, or `""`. Valid until
// the next call into this library on the same thread.
const char *azd_last_error(void);

// Library version as a static string.
const char *azd_version(void);

// Release a string returned by this library.
//
// # Safety
// `s` must be null or a pointer previously returned through an out
// parameter of this library and not yet freed.
void azd_string_free(char *s);

// Parse an integrand in `x` and `n`. `params` is null or a comma-separated
// list of parameter names (values such as `r=3/2` are accepted and
// ignored here).
//
// # Safety
// `expr` and `params` must be null or NUL-terminated; `out` must be null or
// writable.
enum AzdStatus azd_term_parse(const char *expr, const char *params, struct AzdTerm **out);

// # Safety
// `term` must be null or a handle from [`azd_term_parse`] not yet freed.
void azd_term_free(struct AzdTerm *term);

// Canonical text of a parsed integrand.
//
// # Safety
// `term` must be a live handle; `out` must be writable.
enum AzdStatus azd_term_to_string(const struct AzdTerm *term, char **out);

// Find a telescoper of order at most `max_order` (0 selects the default).
//
// # Safety
// `term` must be a live handle; `out` must be writable.
enum AzdStatus azd_derive(const struct AzdTerm *term, uint32_t max_order, struct AzdResult **out);

// # Safety
// `result` must be null or a handle from [`azd_derive`] not yet freed.
void azd_result_free(struct AzdResult *result);

// Order of the derived operator, or `-1` for a null handle.
//
// # Safety
// `result` must be null or a live handle.
int32_t azd_result_order(const struct AzdResult *result);

// Canonical operator text.
//
// # Safety
// `result` must be a live handle; `out` must be writable.
enum AzdStatus azd_result_operator(const struct AzdResult *result, char **out);

// Canonical certificate text.
//
// # Safety
// `result` must be a live handle; `out` must be writable.
enum AzdStatus azd_result_certificate(const struct AzdResult *result, char **out);

// Exact check of an operator and certificate against `term`; the verdict is
// written to `verified`.
//
// # Safety
// `term` must be a live handle, the strings NUL-terminated and `verified`
// writable.
enum AzdStatus azd_verify(const struct AzdTerm *term,
                          const char *operator_,
                          const char *certificate,
                          bool *verified);

// Integrate `F_n` over `interval` (`a,b`, `a,inf` or `-inf,inf`).
// `param_values` is null or `name=value` pairs; `tol <= 0` selects the
// default tolerance.
//
// # Safety
// `term` must be a live handle, the strings null or NUL-terminated and the
// out pointers writable.
enum AzdStatus azd_integrate(const struct AzdTerm *term,
                             int64_t n,
                             const char *interval,
                             const char *param_values,
                             double tol,
                             double *value,
                             double *error_estimate);

// Unroll `operator` from comma-separated `initials` at indices
// `start, start+1, ...` and return the sequence table as JSON.
//
// # Safety
// Strings must be null (where optional) or NUL-terminated; `out_json` must
// be writable.
enum AzdStatus azd_unroll_json(const char *operator_,
                               const char *params,
                               const char *initials,
                               int64_t start,
                               uint32_t count,
                               char **out_json);

// The `e⁻¹` approximation analysis for `n = 1..=count` at `digits` decimal
// digits, as JSON.
//
// # Safety
// `out_json` must be writable.
enum AzdStatus azd_analyze_e_json(uint32_t count, uint32_t digits, char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* AZD_H */

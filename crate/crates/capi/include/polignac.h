#ifndef POLIGNAC_H
#define POLIGNAC_H

/* Generated by cbindgen from polignac-capi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes mirrored from the library's error kinds.
typedef enum PgStatus {
  PG_STATUS_OK = 0,
  PG_STATUS_NULL_ARGUMENT = 1,
  PG_STATUS_PARSE = 2,
  PG_STATUS_DOMAIN = 3,
  PG_STATUS_BUDGET = 4,
  PG_STATUS_FEASIBILITY = 5,
  PG_STATUS_REGIME = 6,
  PG_STATUS_INCOMPLETE_FACTORIZATION = 7,
  PG_STATUS_CONSISTENCY = 8,
  PG_STATUS_CORRECTNESS = 9,
  PG_STATUS_IO = 10,
  PG_STATUS_PANIC = 11,
} PgStatus;

// Representation forms accepted by the finder and scanner entry points.
typedef enum PgForm {
  PG_FORM_PRIME_PLUS2B = 0,
  PG_FORM_PRIME_PLUS2A2B = 1,
  PG_FORM_PRIME_POWER_PLUS2A2B = 2,
} PgForm;

// Opaque handle to an assembled construction.
typedef struct PgConstruction PgConstruction;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static string; do not free.
const char *pg_version(void);

// Message for the most recent failure on this thread, or NULL. The caller
// owns the returned string.
char *pg_last_error_message(void);

// Releases a string allocated by this library.
//
// # Safety
// `s` must have been returned by a `pg_` function and not freed before.
void pg_string_free(char *s);

// Primality of a decimal natural; deterministic below 2^64.
//
// # Safety
// `n_dec` must be a valid NUL-terminated string; `out_is_prime` must be a
// valid writable pointer.
enum PgStatus pg_is_prime(const char *n_dec, bool *out_is_prime);

// `base^exp (mod modulus)` as a decimal string, or NULL on error.
//
// # Safety
// All three pointers must be valid NUL-terminated strings.
char *pg_mod_pow(const char *base_dec, const char *exp_dec, const char *modulus_dec);

// Factors `n` within the budget (0 selects the defaults) and returns the
// factor list as JSON, or NULL on error.
//
// # Safety
// `n_dec` must be a valid NUL-terminated string.
char *pg_factorize_json(const char *n_dec, uint64_t trial_bound, uint64_t rho_iterations);

// Largest prime factor of `2^p - 1` as a decimal string, or NULL on error
// (including incomplete factorization within budget; 0 selects defaults).
char *pg_mersenne_largest_prime_factor(uint64_t p, uint64_t trial_bound, uint64_t rho_iterations);

// Smallest prime factor of `2^(2^k) + 1` as a decimal string, or NULL on
// error. `max_candidates = 0` selects the default walk budget.
char *pg_fermat_smallest_prime_factor(uint32_t k, uint64_t max_candidates);

// Finds the first representation of odd `n` in the given form. Returns the
// witness as JSON, the string `"null"` when no representation exists, or
// NULL on error. `c` only applies to the `p + c(2^a + 2^b)` form.
//
// # Safety
// `n_dec` must be a valid NUL-terminated string.
char *pg_find_rep_json(enum PgForm form, const char *n_dec, uint64_t c);

// Scans `[lo, hi]` for odd integers with no representation in the given
// form; returns the density report as JSON or NULL on error.
// `budget = 0` selects the default scan ceiling.
char *pg_scan_density_json(uint64_t lo,
                           uint64_t hi,
                           enum PgForm form,
                           uint64_t c,
                           size_t workers,
                           uint64_t budget);

// Checks the covered progression up to `limit`; writes how many members
// were checked and how many violated (always 0 unless the library is
// broken).
//
// # Safety
// `out_checked` and `out_violations` must be valid writable pointers.
enum PgStatus pg_verify_erdos_progression(uint64_t limit,
                                          uint64_t *out_checked,
                                          uint64_t *out_violations);

// Evaluates the divisibility identity at `a < b`: writes the 2-adic
// valuation `s` of `b - a` and whether `2^(2^s) + 1` divides `2^a + 2^b`
// (true unless the library is broken).
//
// # Safety
// `out_s` and `out_divides` must be valid writable pointers.
enum PgStatus pg_crocker_divisibility(uint64_t a, uint64_t b, uint32_t *out_s, bool *out_divides);

// Partial sum of `1/P(2^p - 1)` over primes `p <= limit` (0 budgets select
// defaults); writes the sum and how many terms hit the factoring budget.
//
// # Safety
// `out_sum` and `out_incomplete_terms` must be valid writable pointers.
enum PgStatus pg_c3_partial(uint64_t limit,
                            uint64_t trial_bound,
                            uint64_t rho_iterations,
                            double *out_sum,
                            uint64_t *out_incomplete_terms);

// Assembles a construction with greedy block selection. Constants at 0
// select the defaults (`c3` then comes from the partial-sum computation).
// Returns an opaque handle, or NULL on error.
//
// # Safety
// `x_dec` must be a valid NUL-terminated string.
struct PgConstruction *pg_construction_build(const char *x_dec,
                                             uint32_t k,
                                             double l,
                                             double u,
                                             uint32_t m,
                                             uint32_t k_prime,
                                             double c1,
                                             double c2,
                                             double c3);

// Parses a construction document, audits every invariant, and returns an
// opaque handle, or NULL on error.
//
// # Safety
// `json` must be a valid NUL-terminated string.
struct PgConstruction *pg_construction_from_json(const char *json);

// Canonical JSON document for the construction, or NULL on error.
//
// # Safety
// `h` must be a live handle from this library.
char *pg_construction_to_json(const struct PgConstruction *h);

// The progression residue `beta` as a decimal string, or NULL on error.
//
// # Safety
// `h` must be a live handle from this library.
char *pg_construction_beta(const struct PgConstruction *h);

// The modulus `W` as a decimal string (the progression runs mod `2W`), or
// NULL on error.
//
// # Safety
// `h` must be a live handle from this library.
char *pg_construction_w(const struct PgConstruction *h);

// Sweeps the progression up to `x` (see the library docs) and returns the
// report as JSON, or NULL on error. `budget = 0` selects the default scan
// ceiling.
//
// # Safety
// `h` must be a live handle from this library.
char *pg_construction_verify_json(const struct PgConstruction *h,
                                  uint64_t x,
                                  size_t workers,
                                  uint64_t budget);

// Releases a construction handle.
//
// # Safety
// `h` must be a live handle from this library, not freed before.
void pg_construction_free(struct PgConstruction *h);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* POLIGNAC_H */

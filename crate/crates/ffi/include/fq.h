#ifndef FQ_H
#define FQ_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every fallible call.
typedef enum FqStatus {
  FQ_STATUS_OK = 0,
  FQ_STATUS_NOT_PRIME = 1,
  FQ_STATUS_MODULUS_OUT_OF_RANGE = 2,
  FQ_STATUS_MISSING_PRIMITIVE_ROOT = 3,
  FQ_STATUS_BAD_PARAMETER = 4,
  FQ_STATUS_NOT_COPRIME = 5,
  FQ_STATUS_BAD_COEFFICIENTS = 6,
  FQ_STATUS_TOO_LONG = 7,
  FQ_STATUS_DIMENSION_UNSUPPORTED = 8,
  FQ_STATUS_PARAM_RANGE = 9,
  FQ_STATUS_CACHE_CORRUPT = 10,
  FQ_STATUS_IO = 11,
  FQ_STATUS_JSON = 12,
  FQ_STATUS_NULL_POINTER = 13,
  FQ_STATUS_PANIC = 14,
} FqStatus;

// Prime modulus with an optional primitive root.
typedef struct FqContext FqContext;

// Hash parameters (`n`, `r`, primes, start value).
typedef struct FqHashParams FqHashParams;

// Trade-off tables for single queries.
typedef struct FqLookup FqLookup;

// Full table `q_p(0..p-1)`.
typedef struct FqTable FqTable;

typedef struct FqGraphStats {
  uint64_t p;
  // Fixed points other than 0.
  uint64_t fixed_points_excl0;
  uint64_t fixed_points_incl0;
  uint64_t image_size;
  // Nodes on cycles, including the fixed point 0.
  uint64_t cyclic_count;
} FqGraphStats;

typedef struct FqOrbit {
  // Number of distinct values visited.
  uint64_t rho;
  // Tail length before the cycle.
  uint64_t mu;
  uint64_t cycle_len;
} FqOrbit;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Static description of a status code. Never null.
const char *fq_status_message(enum FqStatus status);

// Detail message of the last failure on this thread, or null if none.
// The pointer stays valid until the next failing call on the same thread.
const char *fq_last_error_message(void);

// Creates a context for the odd prime `p < 2^31`. With `want_primitive_root`
// the smallest primitive root is found, which table generation requires.
//
// # Safety
// `out` must be a valid pointer.
enum FqStatus fq_context_new(uint64_t p, bool want_primitive_root, struct FqContext **out);

// # Safety
// `ctx` must be null or a handle from [`fq_context_new`] not yet freed.
void fq_context_free(struct FqContext *ctx);

// The modulus of `ctx`, or 0 if `ctx` is null.
//
// # Safety
// `ctx` must be null or a live context handle.
uint64_t fq_context_p(const struct FqContext *ctx);

// `q_p(u)` for any signed `u`.
//
// # Safety
// `ctx` must be a live context handle and `out` a valid pointer.
enum FqStatus fq_eval(const struct FqContext *ctx, int64_t u, uint32_t *out);

// Smallest `u >= 1` with `q_p(u) != 0`.
//
// # Safety
// `ctx` must be a live context handle and `out` a valid pointer.
enum FqStatus fq_lp(const struct FqContext *ctx, uint64_t *out);

// Builds the full table. The context must carry a primitive root.
//
// # Safety
// `ctx` must be a live context handle and `out` a valid pointer.
enum FqStatus fq_table_new(const struct FqContext *ctx, struct FqTable **out);

// # Safety
// `table` must be null or a handle from [`fq_table_new`] not yet freed.
void fq_table_free(struct FqTable *table);

// Number of entries (`p`), or 0 if `table` is null.
//
// # Safety
// `table` must be null or a live table handle.
uintptr_t fq_table_len(const struct FqTable *table);

// Borrowed view of the `p` values, valid while `table` lives; null if
// `table` is null.
//
// # Safety
// `table` must be null or a live table handle.
const uint32_t *fq_table_values(const struct FqTable *table);

// # Safety
// `table` must be a live table handle and `out` a valid pointer.
enum FqStatus fq_table_get(const struct FqTable *table, uint64_t u, uint32_t *out);

// # Safety
// `table` must be a live table handle and `out` a valid pointer.
enum FqStatus fq_graph_stats(const struct FqTable *table, struct FqGraphStats *out);

// Orbit of `u0` in `[0, p)`. `table` may be null, in which case values are
// computed on the fly with Brent's cycle finder.
//
// # Safety
// `ctx` must be a live context handle, `table` null or a live table handle,
// and `out` a valid pointer.
enum FqStatus fq_orbit(const struct FqContext *ctx,
                       const struct FqTable *table,
                       uint64_t u0,
                       struct FqOrbit *out);

// Precomputes the trade-off tables for `2 <= z < p`.
//
// # Safety
// `ctx` must be a live context handle and `out` a valid pointer.
enum FqStatus fq_lookup_new(const struct FqContext *ctx, double z, struct FqLookup **out);

// # Safety
// `lookup` must be null or a handle from [`fq_lookup_new`] not yet freed.
void fq_lookup_free(struct FqLookup *lookup);

// `q_p(u)` for `u` in `[0, p)` from the trade-off tables.
//
// # Safety
// `lookup` must be a live lookup handle and `out` a valid pointer.
enum FqStatus fq_lookup_query(const struct FqLookup *lookup, uint64_t u, uint32_t *out);

// Writes `u = v / w (mod p)` with `0 < v < p/z` and `0 < |w| <= z`.
//
// # Safety
// `v` and `w` must be valid pointers.
enum FqStatus fq_rational_reconstruct(uint64_t p, double z, uint64_t u, uint64_t *v, int64_t *w);

// Linear complexity of `seq[0..len]` over `F_p` (values are reduced mod `p`).
//
// # Safety
// `seq` must point to `len` readable values (or be null with `len == 0`)
// and `out` must be a valid pointer.
enum FqStatus fq_linear_complexity(const uint64_t *seq, uintptr_t len, uint64_t p, uintptr_t *out);

// `|sum_{u=m+1}^{m+n} e_p(a_0 q_p(u) + ... + a_{s-1} q_p(u+s-1))|`.
// The context must carry a primitive root.
//
// # Safety
// `ctx` must be a live context handle, `a` must point to `s` readable
// coefficients and `out` must be a valid pointer.
enum FqStatus fq_exp_sum(const struct FqContext *ctx,
                         int64_t m,
                         uint64_t n,
                         const int64_t *a,
                         uintptr_t s,
                         double *out);

// Exact star discrepancy of `len` points in `[0, 1)`.
//
// # Safety
// `points` must point to `len` readable values and `out` must be valid.
enum FqStatus fq_star_discrepancy_1d(const double *points, uintptr_t len, double *out);

// Derives hash parameters from a seed; `8 <= n <= 31`, `1 <= r <= 8`.
//
// # Safety
// `out` must be a valid pointer.
enum FqStatus fq_hash_keygen(uint64_t seed, uint32_t n, uint32_t r, struct FqHashParams **out);

// Parses and validates hash parameters from a NUL-terminated JSON string.
//
// # Safety
// `json` must be a valid NUL-terminated string and `out` a valid pointer.
enum FqStatus fq_hash_params_from_json(const char *json, struct FqHashParams **out);

// # Safety
// `params` must be null or a live hash-parameter handle.
void fq_hash_params_free(struct FqHashParams *params);

// Output width `n` in bits, or 0 if `params` is null.
//
// # Safety
// `params` must be null or a live hash-parameter handle.
uint32_t fq_hash_params_n(const struct FqHashParams *params);

// Digest of `len` bytes, read most significant bit first.
//
// # Safety
// `params` must be a live hash-parameter handle, `bytes` must point to
// `len` readable bytes (or be null with `len == 0`) and `out` must be valid.
enum FqStatus fq_hash_digest(const struct FqHashParams *params,
                             const uint8_t *bytes,
                             uintptr_t len,
                             uint32_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FQ_H */

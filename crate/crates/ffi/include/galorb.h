#ifndef GALORB_H
#define GALORB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Status codes shared by all entry points.
 */
typedef enum GalorbStatus {
  GALORB_STATUS_OK = 0,
  GALORB_STATUS_INVALID_ARGUMENT = 1,
  GALORB_STATUS_NOT_PRIME = 2,
  GALORB_STATUS_CAPACITY = 3,
  GALORB_STATUS_UNSUPPORTED = 4,
  GALORB_STATUS_NULL_POINTER = 5,
  GALORB_STATUS_BUFFER_TOO_SMALL = 6,
  GALORB_STATUS_INTERNAL = 7,
  GALORB_STATUS_PANIC = 8,
} GalorbStatus;

/*
 Opaque unit group of `O_E / p_E^n`.
 */
typedef struct GalorbUnitGroup GalorbUnitGroup;

/*
 Type-orbit counts by kind.
 */
typedef struct GalorbLtBreakdown {
  uint64_t unramified;
  uint64_t principal_series;
  uint64_t steinberg;
  uint64_t supercuspidal_unramified;
  uint64_t supercuspidal_ramified;
  uint64_t supercuspidal_delta2;
  uint64_t supercuspidal_delta3;
  uint64_t sporadic;
  uint64_t total;
} GalorbLtBreakdown;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failure on this thread, or NULL. The pointer stays
 valid until the next failing call on the same thread.
 */
const char *galorb_last_error(void);

/*
 Frees a string returned by this library. NULL is ignored.

 # Safety
 `s` must come from this library and not have been freed.
 */
void galorb_string_free(char *s);

/*
 Number of positive divisors of `a`.

 # Safety
 `out` must be valid for writes.
 */
enum GalorbStatus galorb_sigma0(uint64_t a, uint64_t *out);

/*
 Hilbert symbol `(a, b)_p` as +1 or -1.

 # Safety
 `out` must be valid for writes.
 */
enum GalorbStatus galorb_hilbert_symbol(int64_t a, int64_t b, uint64_t p, int32_t *out);

/*
 Closed-form type counts at conductor `p^n`.

 # Safety
 `out` must be valid for writes.
 */
enum GalorbStatus galorb_lt_closed(uint64_t p, uint32_t n, struct GalorbLtBreakdown *out);

/*
 Type counts by enumeration, with rings of at most `budget` elements.

 # Safety
 `out` must be valid for writes.
 */
enum GalorbStatus galorb_lt_enumerated(uint64_t p,
                                       uint32_t n,
                                       uint64_t budget,
                                       struct GalorbLtBreakdown *out);

/*
 Closed-form `LO(p^n)`.

 # Safety
 `out` must be valid for writes.
 */
enum GalorbStatus galorb_lo_closed(uint64_t p, uint32_t n, uint64_t *out);

/*
 `LO(p^n)` summed from the type census.

 # Safety
 `out` must be valid for writes.
 */
enum GalorbStatus galorb_lo_derived(uint64_t p, uint32_t n, uint64_t budget, uint64_t *out);

/*
 Lower bound for level `n_level`; `rigorous` is set when the level is 1, a
 prime power or squarefree.

 # Safety
 Both out pointers must be valid for writes.
 */
enum GalorbStatus galorb_bound(uint64_t n_level, uint64_t *out_bound, bool *out_rigorous);

/*
 Number of Galois orbits of primitive characters of conductor `n` on
 `Q_p(sqrt(d))` restricting to the extension's quadratic character.

 # Safety
 `out` must be valid for writes.
 */
enum GalorbStatus galorb_count_primitive_orbits(uint64_t p,
                                                int64_t d,
                                                uint32_t n,
                                                bool identify_conjugate,
                                                uint64_t budget,
                                                uint64_t *out);

/*
 JSON census of the type orbits at conductor `p^n`. Free the result with
 `galorb_string_free`.

 # Safety
 `out` must be valid for writes.
 */
enum GalorbStatus galorb_census_json(uint64_t p, uint32_t n, uint64_t budget, char **out);

/*
 Computes the unit group of `O_E / p_E^n` for `E = Q_p(sqrt(d))`.

 # Safety
 `out` must be valid for writes.
 */
enum GalorbStatus galorb_unit_group_new(uint64_t p,
                                        int64_t d,
                                        uint32_t n,
                                        uint64_t budget,
                                        struct GalorbUnitGroup **out);

/*
 Frees a handle. NULL is ignored.

 # Safety
 `g` must come from `galorb_unit_group_new` and not have been freed.
 */
void galorb_unit_group_free(struct GalorbUnitGroup *g);

/*
 Group order.

 # Safety
 `g` must be a live handle; `out` valid for writes.
 */
enum GalorbStatus galorb_unit_group_order(const struct GalorbUnitGroup *g, uint64_t *out);

/*
 Field label, owned by the handle.

 # Safety
 `g` must be a live handle; `out` valid for writes.
 */
enum GalorbStatus galorb_unit_group_field(const struct GalorbUnitGroup *g, const char **out);

/*
 Copies the invariant factors (ascending, each dividing the next) into
 `buf`. `out_len` always receives the number of factors; if `cap` is too
 small nothing is copied and `BufferTooSmall` is returned.

 # Safety
 `g` must be a live handle; `buf` valid for `cap` writes (may be NULL
 when `cap` is 0); `out_len` valid for writes.
 */
enum GalorbStatus galorb_unit_group_invariant_factors(const struct GalorbUnitGroup *g,
                                                      uint64_t *buf,
                                                      size_t cap,
                                                      size_t *out_len);

/*
 Static description of a status code.
 */
const char *galorb_status_name(enum GalorbStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GALORB_H */

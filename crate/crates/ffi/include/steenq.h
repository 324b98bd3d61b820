#ifndef STEENQ_H
#define STEENQ_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Filtration reported for the zero element.
 */
#define STEENQ_FILTRATION_INFINITE UINT64_MAX

typedef enum SteenqStatus {
  STEENQ_STATUS_OK = 0,
  STEENQ_STATUS_PARSE_ERROR = 1,
  STEENQ_STATUS_VERIFICATION_FAILED = 2,
  STEENQ_STATUS_RESOURCE_GUARD = 3,
  STEENQ_STATUS_INVALID_ARGUMENT = 4,
  STEENQ_STATUS_NULL_POINTER = 5,
  STEENQ_STATUS_PANIC = 6,
} SteenqStatus;

/**
 * An element of A_q in the Milnor basis.
 */
typedef struct SteenqElement SteenqElement;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *steenq_last_error(void);

/**
 * Parses an element of A_q, q = p^e.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` writable.
 */
enum SteenqStatus steenq_element_parse(uint32_t p,
                                       uint32_t e,
                                       const char *text,
                                       struct SteenqElement **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `x` must come from this library and not be freed twice.
 */
void steenq_element_free(struct SteenqElement *x);

/**
 * Product of two elements of the same algebra.
 *
 * # Safety
 * `a` and `b` must be live handles and `out` writable.
 */
enum SteenqStatus steenq_element_mul(const struct SteenqElement *a,
                                     const struct SteenqElement *b,
                                     struct SteenqElement **out);

/**
 * The antipode χ.
 *
 * # Safety
 * `a` must be a live handle and `out` writable.
 */
enum SteenqStatus steenq_element_antipode(const struct SteenqElement *a,
                                          struct SteenqElement **out);

/**
 * Text form, e.g. "P(1,3,1) + P(4,2,1)".
 *
 * # Safety
 * `a` must be a live handle and `out` writable.
 */
enum SteenqStatus steenq_element_to_string(const struct SteenqElement *a, char **out);

/**
 * May filtration; `STEENQ_FILTRATION_INFINITE` for zero.
 *
 * # Safety
 * `a` must be a live handle and `out` writable.
 */
enum SteenqStatus steenq_element_filtration(const struct SteenqElement *a, uint64_t *out);

/**
 * Degree of a homogeneous nonzero element.
 *
 * # Safety
 * `a` must be a live handle and `out` writable.
 */
enum SteenqStatus steenq_element_degree(const struct SteenqElement *a, uint64_t *out);

/**
 * Rewrites a word such as "Sq^2 Sq^2" in the admissible basis.
 *
 * # Safety
 * `word` must be a NUL-terminated string and `out` writable.
 */
enum SteenqStatus steenq_rewrite(uint32_t p, uint32_t e, const char *word, char **out);

/**
 * Poincaré polynomial of E⁰(A_q(n-2)) as text.
 *
 * # Safety
 * `out` must be writable.
 */
enum SteenqStatus steenq_poincare(uint32_t p, uint32_t e, uint32_t n, char **out);

/**
 * JSON report comparing E⁰ of the unitriangular group algebra with
 * E⁰(A_q(n-2)). Returns `VerificationFailed` (with the report still
 * written) when the comparison finds a mismatch.
 *
 * # Safety
 * `out` must be writable.
 */
enum SteenqStatus steenq_priddy_json(uint32_t p, uint32_t e, uint32_t n, char **out);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void steenq_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STEENQ_H */

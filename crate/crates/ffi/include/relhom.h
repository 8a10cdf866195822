#ifndef RELHOM_H
#define RELHOM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible call.
 */
typedef enum RelhomStatus {
  RELHOM_STATUS_OK = 0,
  RELHOM_STATUS_NULL_POINTER = 1,
  RELHOM_STATUS_INVALID_UTF8 = 2,
  RELHOM_STATUS_PARSE = 3,
  RELHOM_STATUS_UNKNOWN_FIXTURE = 4,
  RELHOM_STATUS_SIGNATURE_MISMATCH = 5,
  RELHOM_STATUS_NOT_IN_UNIVERSE = 6,
  RELHOM_STATUS_CAP_EXCEEDED = 7,
  RELHOM_STATUS_PRECONDITION = 8,
  RELHOM_STATUS_INVALID_ARGUMENT = 9,
  RELHOM_STATUS_INTERNAL = 10,
  RELHOM_STATUS_PANIC = 11,
} RelhomStatus;

/**
 * Opaque handle to a finite relational structure.
 */
typedef struct RelhomStructure RelhomStructure;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses a structure from its text form.
 *
 * # Safety
 * `src` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum RelhomStatus relhom_structure_parse(const char *src, struct RelhomStructure **out);

/**
 * Loads a built-in structure (`sft3`, `edge`, `tri`, `c3`, `k2`, `pt1`).
 *
 * # Safety
 * `name` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum RelhomStatus relhom_structure_fixture(const char *name, struct RelhomStructure **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `h` must come from this library and not be used afterwards.
 */
void relhom_structure_free(struct RelhomStructure *h);

/**
 * Number of elements, or 0 for a null handle.
 *
 * # Safety
 * `h` must be null or a live handle.
 */
size_t relhom_structure_len(const struct RelhomStructure *h);

/**
 * Text form of the structure, or null on failure.
 *
 * # Safety
 * `h` must be null or a live handle.
 */
char *relhom_structure_render(const struct RelhomStructure *h);

/**
 * Whether greedy folding reaches a single element.
 *
 * # Safety
 * `h` must be a live handle and `out` a valid pointer.
 */
enum RelhomStatus relhom_is_dismantlable(const struct RelhomStructure *h, bool *out);

/**
 * Runs the two-phase decision with the fixed elements `j` (comma-separated
 * names, may be null). Writes the verdict, and the mixing gap when it holds
 * (0 otherwise).
 *
 * # Safety
 * `h` must be a live handle, `j` null or a valid string, and the outputs
 * valid pointers.
 */
enum RelhomStatus relhom_decide(const struct RelhomStructure *h,
                                const char *j,
                                bool *out_holds,
                                size_t *out_gap);

/**
 * Same as `relhom_decide` with the full report as a JSON string.
 *
 * # Safety
 * As for `relhom_decide`; `out` receives a string for `relhom_string_free`.
 */
enum RelhomStatus relhom_decide_json(const struct RelhomStructure *h, const char *j, char **out);

/**
 * Whether every endomorphism is a bijection.
 *
 * # Safety
 * `h` must be a live handle and `out` a valid pointer.
 */
enum RelhomStatus relhom_is_core(const struct RelhomStructure *h, bool *out);

/**
 * Counts homomorphisms `g -> h`, failing with `CapExceeded` past `cap`.
 *
 * # Safety
 * `g` and `h` must be live handles and `out` a valid pointer.
 */
enum RelhomStatus relhom_count_homs(const struct RelhomStructure *g,
                                    const struct RelhomStructure *h,
                                    size_t cap,
                                    size_t *out);

/**
 * Message of the last failure on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *relhom_last_error(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void relhom_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RELHOM_H */

#ifndef AIFM_H
#define AIFM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum AifmStatus {
  AIFM_STATUS_OK = 0,
  /**
   * The checked property does not hold.
   */
  AIFM_STATUS_VERDICT_FALSE = 1,
  AIFM_STATUS_INPUT_ERROR = 2,
  AIFM_STATUS_CAP_EXCEEDED = 3,
  AIFM_STATUS_NULL_POINTER = 4,
  /**
   * A Rust panic was caught at the boundary.
   */
  AIFM_STATUS_INTERNAL = 5,
} AifmStatus;

/**
 * Opaque initialized arena.
 */
typedef struct AifmArena AifmArena;

/**
 * Opaque memory skeleton.
 */
typedef struct AifmSkeleton AifmSkeleton;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread; empty after a success. The
 * pointer stays valid until the next call on the same thread.
 */
const char *aifm_last_error(void);

/**
 * # Safety
 * `s` is null or a string returned by this library, not yet freed.
 */
void aifm_string_free(char *s);

/**
 * # Safety
 * `json` is a NUL-terminated string; `out` is writable.
 */
enum AifmStatus aifm_arena_from_json(const char *json, struct AifmArena **out);

/**
 * A registered fixture (`fig3`, `fig4`, `split-left`, `split-right`).
 *
 * # Safety
 * `name` is a NUL-terminated string; `out` is writable.
 */
enum AifmStatus aifm_arena_fixture(const char *name, struct AifmArena **out);

/**
 * # Safety
 * `arena` is null or a handle from this library, not yet freed.
 */
void aifm_arena_free(struct AifmArena *arena);

/**
 * # Safety
 * `arena` is a live handle; `out` is writable.
 */
enum AifmStatus aifm_arena_to_json(const struct AifmArena *arena, char **out);

/**
 * Number of states, or 0 for a null handle.
 *
 * # Safety
 * `arena` is null or a live handle.
 */
size_t aifm_arena_state_count(const struct AifmArena *arena);

/**
 * # Safety
 * `json` is a NUL-terminated string; `out` is writable.
 */
enum AifmStatus aifm_skeleton_from_json(const char *json, struct AifmSkeleton **out);

/**
 * The one-state skeleton over the colors of `arena`.
 *
 * # Safety
 * `arena` is a live handle; `out` is writable.
 */
enum AifmStatus aifm_skeleton_trivial(const struct AifmArena *arena, struct AifmSkeleton **out);

/**
 * The largest-color skeleton over the colors of `arena`.
 *
 * # Safety
 * `arena` is a live handle; `out` is writable.
 */
enum AifmStatus aifm_skeleton_max(const struct AifmArena *arena, struct AifmSkeleton **out);

/**
 * # Safety
 * `skeleton` is null or a handle from this library, not yet freed.
 */
void aifm_skeleton_free(struct AifmSkeleton *skeleton);

/**
 * # Safety
 * `skeleton` is a live handle; `out` is writable.
 */
enum AifmStatus aifm_skeleton_to_json(const struct AifmSkeleton *skeleton, char **out);

/**
 * # Safety
 * Handles are live; `out` is writable.
 */
enum AifmStatus aifm_product(const struct AifmArena *arena,
                             const struct AifmSkeleton *skeleton,
                             struct AifmArena **out);

/**
 * `AIFM_STATUS_OK` if the skeleton covers the arena,
 * `AIFM_STATUS_VERDICT_FALSE` if not.
 *
 * # Safety
 * Handles are live.
 */
enum AifmStatus aifm_is_covered(const struct AifmArena *arena, const struct AifmSkeleton *skeleton);

/**
 * Values of a profile (JSON `{"p1": …, "p2": …}`) from each initial state,
 * as a JSON object.
 *
 * # Safety
 * `arena` is live; strings are NUL-terminated; `out` is writable.
 */
enum AifmStatus aifm_evaluate(const struct AifmArena *arena,
                              const char *objective_spec,
                              const char *profile_json,
                              char **out);

/**
 * Optimal Mealy strategy on `skeleton` for the single player with choices.
 * The report holds `value`, `per_initial`, `uniform` and `strategy`.
 * A `cap` of 0 uses the default enumeration cap.
 *
 * # Safety
 * Handles are live; `objective_spec` is NUL-terminated; `out` is writable.
 */
enum AifmStatus aifm_solve_mdp(const struct AifmArena *arena,
                               const struct AifmSkeleton *skeleton,
                               const char *objective_spec,
                               uint64_t cap,
                               char **out);

/**
 * Equilibrium of Mealy strategies on `skeleton` (P1) and the trivial
 * skeleton (P2). The report holds `values`, `profile` and `warnings`.
 *
 * # Safety
 * Handles are live; `objective_spec` is NUL-terminated; `out` is writable.
 */
enum AifmStatus aifm_solve_game(const struct AifmArena *arena,
                                const struct AifmSkeleton *skeleton,
                                const char *objective_spec,
                                uint64_t cap,
                                char **out);

/**
 * Checks a profile against memoryless deviations (`skeleton` null) or
 * Mealy deviations on `skeleton`. Writes a JSON verdict to `out` and
 * returns `AIFM_STATUS_VERDICT_FALSE` when some player can improve.
 *
 * # Safety
 * `arena` is live, `skeleton` is null or live; strings are NUL-terminated;
 * `out` is writable.
 */
enum AifmStatus aifm_check_ne(const struct AifmArena *arena,
                              const struct AifmSkeleton *skeleton,
                              const char *objective_spec,
                              const char *profile_json,
                              uint64_t cap,
                              char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* AIFM_H */

#ifndef CMPG_H
#define CMPG_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Which qualitative winning set to compute.
 */
typedef enum CmpgObjective {
  /**
   * Almost-sure winning: the mean payoff hits the maximal reward with
   * probability one.
   */
  CMPG_OBJECTIVE_ALMOST = 0,
  /**
   * Positive winning: the same event has positive probability.
   */
  CMPG_OBJECTIVE_POSITIVE = 1,
} CmpgObjective;

/**
 * Status of a C API call.
 */
typedef enum CmpgStatus {
  /**
   * The call succeeded and all out-pointers are written.
   */
  CMPG_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  CMPG_STATUS_ERR_NULL = 1,
  /**
   * A text argument was not valid UTF-8.
   */
  CMPG_STATUS_ERR_UTF8 = 2,
  /**
   * A text argument failed to parse; see `cmpg_last_error`.
   */
  CMPG_STATUS_ERR_PARSE = 3,
  /**
   * Arguments violate a precondition (bad epsilon, wrong buffer length,
   * unknown node, unsupported strategy shape); see `cmpg_last_error`.
   */
  CMPG_STATUS_ERR_INVALID = 4,
  /**
   * The relevant winning set is empty; there is nothing to synthesize.
   */
  CMPG_STATUS_ERR_EMPTY = 5,
  /**
   * An internal inconsistency or panic; see `cmpg_last_error`.
   */
  CMPG_STATUS_ERR_INTERNAL = 6,
} CmpgStatus;

/**
 * Opaque handle to a parsed, validated game.
 */
typedef struct CmpgGame CmpgGame;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Returns the library version as a static string. Do not free it.
 */
const char *cmpg_version(void);

/**
 * Returns the thread-local message describing the most recent failure on
 * this thread, or an empty string. Valid until the next failing call on
 * the same thread; do not free it.
 */
const char *cmpg_last_error(void);

/**
 * Frees a string returned through an out-pointer of this API.
 *
 * # Safety
 * `s` must be null or a pointer previously written by this API through a
 * `char **` out-parameter, not yet freed.
 */
void cmpg_string_free(char *s);

/**
 * Parses a game from its text format into a fresh handle.
 *
 * # Safety
 * `text` must be a valid NUL-terminated C string; `out_game` must be a
 * valid pointer. On `CMPG_STATUS_OK` the caller owns the handle and must
 * release it with [`cmpg_game_free`].
 */
enum CmpgStatus cmpg_game_parse(const char *text, struct CmpgGame **out_game);

/**
 * Releases a game handle. Null is a no-op.
 *
 * # Safety
 * `game` must be null or a handle from [`cmpg_game_parse`], not yet freed.
 */
void cmpg_game_free(struct CmpgGame *game);

/**
 * Number of states of the game; 0 when the handle is null.
 *
 * # Safety
 * `game` must be null or a live handle from [`cmpg_game_parse`].
 */
size_t cmpg_game_state_count(const struct CmpgGame *game);

/**
 * Returns the game's name as a fresh string (free with
 * [`cmpg_string_free`]); null when the handle is null.
 *
 * # Safety
 * `game` must be null or a live handle from [`cmpg_game_parse`].
 */
char *cmpg_game_name(const struct CmpgGame *game);

/**
 * Serializes the game back to its canonical text format.
 *
 * # Safety
 * `game` must be a live handle from [`cmpg_game_parse`]; `out_text` must
 * be a valid pointer.
 */
enum CmpgStatus cmpg_game_to_text(const struct CmpgGame *game, char **out_text);

/**
 * Computes a qualitative winning set and writes the per-state level report
 * (one `NAME level=K in_winning=yes|no` line per state, sorted by name).
 *
 * # Safety
 * `game` must be a live handle from [`cmpg_game_parse`]; `out_report`
 * must be a valid pointer.
 */
enum CmpgStatus cmpg_solve_report(const struct CmpgGame *game,
                                  enum CmpgObjective objective,
                                  bool improved,
                                  char **out_report);

/**
 * Computes a qualitative winning set into a caller-provided mask: for
 * every state id `s`, `mask[s]` is set to 1 when `s` is winning and 0
 * otherwise. `len` must equal the game's state count.
 *
 * # Safety
 * `game` must be a live handle from [`cmpg_game_parse`]; `mask` must
 * point to at least `len` writable bytes.
 */
enum CmpgStatus cmpg_winning_mask(const struct CmpgGame *game,
                                  enum CmpgObjective objective,
                                  bool improved,
                                  uint8_t *mask,
                                  size_t len);

/**
 * Synthesizes the eps-graded stationary strategy on the almost-sure
 * winning set and writes its text form. Returns `CMPG_STATUS_ERR_EMPTY`
 * when the winning set is empty.
 *
 * # Safety
 * `game` must be a live handle from [`cmpg_game_parse`]; `eps` must be a
 * valid NUL-terminated C string holding a rational in `(0, 1)` as `p/q`;
 * `out_strategy` must be a valid pointer.
 */
enum CmpgStatus cmpg_synth_eps_stationary(const struct CmpgGame *game,
                                          const char *eps,
                                          char **out_strategy);

/**
 * Checks a stationary strategy (in text form) against the eps-almost-sure
 * claim on the almost-sure winning set. On `CMPG_STATUS_OK`, `out_pass`
 * reports the verdict and, when `out_report` is non-null, the per-state
 * report text is written to it.
 *
 * # Safety
 * `game` must be a live handle from [`cmpg_game_parse`]; `strategy` and
 * `eps` must be valid NUL-terminated C strings; `out_pass` must be a
 * valid pointer; `out_report` may be null.
 */
enum CmpgStatus cmpg_verify_eps(const struct CmpgGame *game,
                                const char *strategy,
                                const char *eps,
                                bool *out_pass,
                                char **out_report);

/**
 * Reduces a deterministic mean-payoff game (in text form) to a concurrent
 * game; writes the reduced game's text and the edge-to-gadget map text.
 *
 * # Safety
 * `dmpg_text` must be a valid NUL-terminated C string; `out_game` and
 * `out_map` must be valid pointers.
 */
enum CmpgStatus cmpg_reduce(const char *dmpg_text, char **out_game, char **out_map);

/**
 * Computes the exact deterministic mean-payoff value of `node` in the
 * game given in text form, by brute force over positional profiles, and
 * writes it as a rational string.
 *
 * # Safety
 * `dmpg_text` and `node` must be valid NUL-terminated C strings;
 * `out_value` must be a valid pointer.
 */
enum CmpgStatus cmpg_dmpg_value(const char *dmpg_text, const char *node, char **out_value);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* CMPG_H */

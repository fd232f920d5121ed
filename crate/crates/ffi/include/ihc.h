/* Generated by cbindgen; do not edit. */

#ifndef IHC_H
#define IHC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum IhcStatus {
  IHC_STATUS_OK = 0,
  IHC_STATUS_NULL_ARGUMENT = 1,
  IHC_STATUS_INVALID_UTF8 = 2,
  IHC_STATUS_PARSE = 3,
  IHC_STATUS_SOLVER = 4,
  IHC_STATUS_CERTIFICATE = 5,
  IHC_STATUS_PANIC = 6,
} IhcStatus;

/**
 * Same numbering as the command-line exit codes.
 */
typedef enum IhcVerdict {
  IHC_VERDICT_SOLVABLE = 0,
  IHC_VERDICT_UNSOLVABLE = 1,
  IHC_VERDICT_UNKNOWN = 2,
  IHC_VERDICT_LEMMA_REJECTED = 3,
} IhcVerdict;

/**
 * A parsed problem.
 */
typedef struct IhcProblem IhcProblem;

/**
 * The outcome of [`ihc_solve`].
 */
typedef struct IhcReport IhcReport;

typedef struct IhcOptions {
  /**
   * Whole-run budget in milliseconds; 0 disables it.
   */
  uint64_t timeout_ms;
  uint64_t smt_timeout_ms;
  uint32_t max_inductions;
  uint32_t max_unfolds;
  uint32_t jobs;
  bool apply_p_replace;
  bool unfold_without_induct;
} IhcOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Defaults used by the command line.
 */
struct IhcOptions ihc_options_default(void);

/**
 * Message for the last failed call on this thread; empty after a success.
 * The pointer is valid until the next call on the same thread.
 */
const char *ihc_last_error(void);

const char *ihc_version(void);

/**
 * Parses problem text into `*out`.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum IhcStatus ihc_problem_parse(const char *text, struct IhcProblem **out);

/**
 * # Safety
 * `problem` must come from [`ihc_problem_parse`] or be null.
 */
void ihc_problem_free(struct IhcProblem *problem);

/**
 * # Safety
 * `problem` must be a live handle or null.
 */
size_t ihc_problem_goal_count(const struct IhcProblem *problem);

/**
 * # Safety
 * `problem` must be a live handle or null.
 */
size_t ihc_problem_lemma_count(const struct IhcProblem *problem);

/**
 * Solves `problem`. `options` and `solver` may be null for the defaults;
 * `solver` is a whitespace-separated command line.
 *
 * # Safety
 * Pointers must be valid or null as documented; `out` must not be null.
 */
enum IhcStatus ihc_solve(const struct IhcProblem *problem,
                         const struct IhcOptions *options,
                         const char *solver,
                         struct IhcReport **out);

/**
 * # Safety
 * `report` must be a live handle.
 */
enum IhcVerdict ihc_report_verdict(const struct IhcReport *report);

/**
 * One-line human-readable verdict.
 *
 * # Safety
 * `report` must be a live handle or null.
 */
const char *ihc_report_summary(const struct IhcReport *report);

/**
 * Certificate text for a SOLVABLE verdict, otherwise null.
 *
 * # Safety
 * `report` must be a live handle or null.
 */
const char *ihc_report_certificate(const struct IhcReport *report);

/**
 * Counterexample text for an UNSOLVABLE verdict, otherwise null.
 *
 * # Safety
 * `report` must be a live handle or null.
 */
const char *ihc_report_counterexample(const struct IhcReport *report);

/**
 * # Safety
 * `report` must come from [`ihc_solve`] or be null.
 */
void ihc_report_free(struct IhcReport *report);

/**
 * Replays certificate text against `problem`; `*verified` receives the
 * outcome. A rejected certificate is not an error: the call returns
 * `Ok` with `*verified == false` and [`ihc_last_error`] holds the reason.
 *
 * # Safety
 * `certificate` must be NUL-terminated, `problem` live, `verified` valid.
 */
enum IhcStatus ihc_replay(const char *certificate,
                          const struct IhcProblem *problem,
                          const char *solver,
                          bool *verified);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* IHC_H */

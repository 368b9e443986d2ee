#ifndef EPIRATE_H
#define EPIRATE_H

/* Generated by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes mirroring the CLI's exit-code taxonomy, plus FFI-specific
 * argument failures.
 */
typedef enum EpirateStatus {
  EPIRATE_STATUS_OK = 0,
  EPIRATE_STATUS_USAGE = 1,
  EPIRATE_STATUS_NUMERICAL = 2,
  EPIRATE_STATUS_DATA = 3,
  EPIRATE_STATUS_NULL_POINTER = 4,
  EPIRATE_STATUS_INVALID_UTF8 = 5,
} EpirateStatus;

/**
 * Opaque posterior-sample handle.
 */
typedef struct EpirateChain EpirateChain;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent error on this thread, or NULL if none.
 * The pointer stays valid until the next failing epirate call on the same
 * thread.
 */
const char *epirate_last_error_message(void);

/**
 * Load a persisted chain given the base path used when saving (the
 * `.chain.bin` / `.chain.json` suffixes are appended internally).
 *
 * # Safety
 * `base_path` must be a NUL-terminated string; `out` must be a valid
 * pointer. On success `*out` owns the handle and must be released with
 * [`epirate_chain_free`].
 */
enum EpirateStatus epirate_chain_load(const char *base_path, struct EpirateChain **out);

/**
 * Release a chain handle. NULL is a no-op.
 *
 * # Safety
 * `chain` must be a pointer returned by [`epirate_chain_load`], released
 * at most once.
 */
void epirate_chain_free(struct EpirateChain *chain);

/**
 * Number of kept posterior samples; 0 for NULL.
 *
 * # Safety
 * `chain` must be NULL or a live handle.
 */
uintptr_t epirate_chain_n_kept(const struct EpirateChain *chain);

/**
 * Number of parameters; 0 for NULL.
 *
 * # Safety
 * `chain` must be NULL or a live handle.
 */
uintptr_t epirate_chain_dim(const struct EpirateChain *chain);

/**
 * Copy the samples of the named parameter into `out` (capacity `len`,
 * which must be >= the kept-sample count).
 *
 * # Safety
 * `chain` must be a live handle, `name` NUL-terminated, and `out` valid
 * for `len` doubles.
 */
enum EpirateStatus epirate_chain_column(const struct EpirateChain *chain,
                                        const char *name,
                                        double *out,
                                        uintptr_t len);

/**
 * Effective sample size of the named parameter.
 *
 * # Safety
 * `chain` must be a live handle, `name` NUL-terminated, `out` valid.
 */
enum EpirateStatus epirate_chain_ess(const struct EpirateChain *chain,
                                     const char *name,
                                     double *out);

/**
 * Empirical-distribution CRPS of `samples` against observation `y`.
 *
 * # Safety
 * `samples` must be valid for `n` doubles; `out` must be valid.
 */
enum EpirateStatus epirate_crps(const double *samples, uintptr_t n, double y, double *out);

/**
 * Run the full CLI pipeline in-process; returns the would-be exit code.
 * `argv` is a NULL-terminated array of NUL-terminated arguments,
 * beginning with the program name.
 *
 * # Safety
 * `argv` and each entry must satisfy the conventions above.
 */
int32_t epirate_cli_run(const char *const *argv);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EPIRATE_H */

#ifndef INFOMARKET_H
#define INFOMARKET_H

/* Generated by cbindgen from crates/ffi/src. Do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ImStatus {
  IM_STATUS_OK = 0,
  IM_STATUS_NULL_POINTER = 1,
  IM_STATUS_INVALID_ARGUMENT = 2,
  IM_STATUS_IO = 3,
  IM_STATUS_PARSE = 4,
  IM_STATUS_SCHEMA = 5,
  IM_STATUS_PANIC = 6,
} ImStatus;

/**
 * Average log score by day offset.
 */
typedef struct ImCurve ImCurve;

/**
 * Price series of an ensemble of markets.
 */
typedef struct ImMarkets ImMarkets;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or NULL. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *im_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *im_version(void);

/**
 * Probability that at least half of `n` fair coins land tails given `i`
 * tails among the first `k`.
 */
enum ImStatus im_event_probability(uint64_t n, uint64_t i, uint64_t k, double *out);

/**
 * `ln(p / (1 - p))` with `p` clamped away from 0 and 1.
 */
enum ImStatus im_log_likelihood(double p, double *out);

enum ImStatus im_from_log_likelihood(double ll, double *out);

/**
 * Natural log of the probability given to the winner.
 *
 * # Safety
 * `probs` must point to `len` readable doubles.
 */
enum ImStatus im_log_score(const double *probs, size_t len, size_t winner, double *out);

/**
 * Expected entropy loss of a feature, in bits.
 */
enum ImStatus im_entropy_loss(uint64_t pos_df,
                              uint64_t neg_df,
                              uint64_t pos_total,
                              uint64_t neg_total,
                              double *out);

/**
 * Simulates `num_markets` coin-flip markets.
 */
enum ImStatus im_markets_simulate(uint64_t n,
                                  uint64_t flips_per_step,
                                  size_t num_markets,
                                  uint64_t seed,
                                  struct ImMarkets **out);

/**
 * Reads a price CSV.
 *
 * # Safety
 * `path` must be a NUL-terminated string.
 */
enum ImStatus im_markets_load_csv(const char *path, struct ImMarkets **out);

/**
 * Writes a price CSV.
 *
 * # Safety
 * `markets` must be a live handle and `path` a NUL-terminated string.
 */
enum ImStatus im_markets_write_csv(const struct ImMarkets *markets, const char *path);

/**
 * Number of markets, or 0 for NULL.
 *
 * # Safety
 * `markets` must be NULL or a live handle.
 */
size_t im_markets_len(const struct ImMarkets *markets);

/**
 * # Safety
 * `markets` must be NULL or a handle not yet freed.
 */
void im_markets_free(struct ImMarkets *markets);

/**
 * Average log score of the ensemble by day offset.
 *
 * # Safety
 * `markets` must be a live handle.
 */
enum ImStatus im_score_curve(const struct ImMarkets *markets, struct ImCurve **out);

/**
 * # Safety
 * `curve` must be NULL or a live handle.
 */
size_t im_curve_len(const struct ImCurve *curve);

/**
 * Point `index` of the curve, in increasing day offset.
 *
 * # Safety
 * `curve` must be a live handle; the out-pointers must be writable.
 */
enum ImStatus im_curve_point(const struct ImCurve *curve,
                             size_t index,
                             int64_t *day_offset,
                             double *mean_score,
                             size_t *num_markets);

/**
 * # Safety
 * `curve` must be NULL or a handle not yet freed.
 */
void im_curve_free(struct ImCurve *curve);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* INFOMARKET_H */

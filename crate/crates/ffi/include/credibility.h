#ifndef CREDIBILITY_H
#define CREDIBILITY_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CredStatus {
  CRED_STATUS_OK = 0,
  CRED_STATUS_NULL_ARGUMENT = 1,
  CRED_STATUS_INVALID_ARGUMENT = 2,
  CRED_STATUS_IO = 3,
  CRED_STATUS_FORMAT = 4,
  CRED_STATUS_DATA = 5,
  CRED_STATUS_PANIC = 6,
} CredStatus;

/**
 * A review classifier together with the feature pipeline it was trained on.
 */
typedef struct CredClassifier CredClassifier;

/**
 * Labels and scores of a classified corpus, in corpus order.
 */
typedef struct CredResults CredResults;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *cred_last_error(void);

/**
 * Library version as a static string.
 */
const char *cred_version(void);

/**
 * Kendall's tau-b of two series of length `n`.
 *
 * # Safety
 * `x` and `y` must point to `n` doubles; `out` must be writable.
 */
enum CredStatus cred_kendall_tau_b(const double *x, const double *y, size_t n, double *out);

/**
 * Kendall's tau-m of candidate scores `x` against reference scores `y`.
 *
 * # Safety
 * `x` and `y` must point to `n` doubles; `out` must be writable.
 */
enum CredStatus cred_kendall_tau_m(const double *x, const double *y, size_t n, double *out);

/**
 * Base-2 Jensen-Shannon divergence of two distributions of length `n`.
 *
 * # Safety
 * `p` and `q` must point to `n` doubles; `out` must be writable.
 */
enum CredStatus cred_js_divergence(const double *p, const double *q, size_t n, double *out);

/**
 * Burstiness of a review posted at day `t` among its item's `n` review
 * days (which include `t` itself).
 *
 * # Safety
 * `days` must point to `n` doubles; `out` must be writable.
 */
enum CredStatus cred_burstiness(double t, const double *days, size_t n, double *out);

/**
 * Load a classifier. `facet_model_path` may be null to use the path
 * recorded in the model.
 *
 * # Safety
 * Paths must be null or NUL-terminated; `out` must be writable.
 */
enum CredStatus cred_classifier_load(const char *model_path,
                                     const char *facet_model_path,
                                     struct CredClassifier **out);

/**
 * Number of weights of the classifier, or 0 for a null handle.
 *
 * # Safety
 * `classifier` must be null or a live handle.
 */
size_t cred_classifier_num_features(const struct CredClassifier *classifier);

/**
 * # Safety
 * `classifier` must be null or a handle not yet freed.
 */
void cred_classifier_free(struct CredClassifier *classifier);

/**
 * Classify every review of a JSONL or CSV corpus.
 *
 * # Safety
 * `classifier` must be a live handle, `corpus_path` NUL-terminated and
 * `out` writable.
 */
enum CredStatus cred_classify_corpus(const struct CredClassifier *classifier,
                                     const char *corpus_path,
                                     struct CredResults **out);

/**
 * Number of classified reviews, or 0 for a null handle.
 *
 * # Safety
 * `results` must be null or a live handle.
 */
size_t cred_results_len(const struct CredResults *results);

/**
 * Score and label of review `index`: `label` is 1 for credible and -1 for
 * non-credible. Either output pointer may be null.
 *
 * # Safety
 * `results` must be a live handle; non-null outputs must be writable.
 */
enum CredStatus cred_results_get(const struct CredResults *results,
                                 size_t index,
                                 double *score,
                                 int32_t *label);

/**
 * Review id of entry `index`, or null when out of range. The string lives
 * as long as `results`.
 *
 * # Safety
 * `results` must be null or a live handle.
 */
const char *cred_results_review_id(const struct CredResults *results, size_t index);

/**
 * # Safety
 * `results` must be null or a handle not yet freed.
 */
void cred_results_free(struct CredResults *results);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CREDIBILITY_H */

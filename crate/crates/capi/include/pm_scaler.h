/* C ABI for the pm-scaler library.
 *
 * Kept in sync with crates/capi/src/lib.rs; regenerate with
 * `cbindgen --config cbindgen.toml --crate pm-scaler-capi --output include/pm_scaler.h`
 * where cbindgen is available.
 */

#ifndef PM_SCALER_H
#define PM_SCALER_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Status code of every fallible call. */
typedef enum PmStatus {
  /* Success; output arguments are valid. */
  PM_STATUS_OK = 0,
  /* A required pointer argument was NULL. */
  PM_STATUS_NULL_POINTER = 1,
  /* A string argument was not valid UTF-8. */
  PM_STATUS_INVALID_UTF8 = 2,
  /* The model JSON failed to parse or validate. */
  PM_STATUS_INVALID_CONFIG = 3,
  /* A documented size ceiling was exceeded. */
  PM_STATUS_LIMIT_EXCEEDED = 4,
  /* Some other argument was rejected (shape, positivity, 0/1 entries...). */
  PM_STATUS_INVALID_ARGUMENT = 5,
} PmStatus;

/* Opaque, immutable model handle. */
typedef struct PmModel PmModel;

/* Scaling-mean solution. */
typedef struct PmScalingResult {
  double sm;
  uint64_t iterations;
  double residual;
  double contraction_bound;
  /* 1 when the tolerance was met, 0 when the iteration cap was hit. */
  uint8_t converged;
} PmScalingResult;

/* One convergence-sweep record. */
typedef struct PmConvergenceRecord {
  uint64_t seed;
  uint64_t n;
  double log_per;
  double root;
  double entropy;
  double sm;
  double abs_error;
} PmConvergenceRecord;

/* Description of the most recent failure on this thread. The pointer stays
 * valid until the next failing call on the same thread. */
const char *pm_last_error_message(void);

/* Library version as a static NUL-terminated string. */
const char *pm_version(void);

/* Parses and validates a model from its JSON form
 * {"alpha", "beta", "p", "q", "F"}. On success stores a new handle in
 * *out_model; release it with pm_model_free. */
PmStatus pm_model_from_json(const char *json, PmModel **out_model);

/* Releases a handle created by pm_model_from_json. NULL is a no-op. */
void pm_model_free(PmModel *model);

/* Number of row symbols (alpha); 0 if model is NULL. */
uint64_t pm_model_alpha(const PmModel *model);

/* Number of column symbols (beta); 0 if model is NULL. */
uint64_t pm_model_beta(const PmModel *model);

/* Computes the scaling mean of the model by the contraction iteration.
 * Pass tol <= 0 and/or max_iter == 0 to use the library defaults. */
PmStatus pm_scaling_mean(const PmModel *model,
                         double tol,
                         uint64_t max_iter,
                         PmScalingResult *out);

/* Permanent of a row-major n x n matrix by the compensated Ryser formula
 * (n <= 28). Either output pointer may be NULL to skip it. */
PmStatus pm_permanent(const double *entries,
                      uint64_t n,
                      double *out_log_value,
                      double *out_value);

/* Exact number of perfect matchings of a bipartite graph given as a
 * row-major 0/1 adjacency buffer (n <= 24). The 128-bit count is split into
 * *out_high * 2^64 + *out_low; either output pointer may be NULL. */
PmStatus pm_matching_count(const uint8_t *entries,
                           uint64_t n,
                           uint64_t *out_high,
                           uint64_t *out_low);

/* (per(A)/n!)^(1/n) of a strictly positive row-major n x n matrix. */
PmStatus pm_normalized_root(const double *entries, uint64_t n, double *out_root);

/* Runs the quenched-limit sweep over every (seed, n) pair and writes
 * seed_count * n_count records, ordered by seed then by n, into
 * out_records. */
PmStatus pm_convergence_run(const PmModel *model,
                            const uint64_t *n_list,
                            uint64_t n_count,
                            const uint64_t *seeds,
                            uint64_t seed_count,
                            PmConvergenceRecord *out_records);

/* Samples an environment and writes the n x n probability matrix A_n
 * row-major into out_entries. */
PmStatus pm_probability_matrix(const PmModel *model,
                               uint64_t n,
                               uint64_t seed,
                               double *out_entries);

#ifdef __cplusplus
}
#endif

#endif /* PM_SCALER_H */

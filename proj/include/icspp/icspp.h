/*
 * C interface to the icspp library: invariant coordinate selection refined by
 * local projection pursuit on estimated differential entropy.
 *
 * All objects are opaque handles created and destroyed through this API.
 * Every fallible call returns an icspp_status; on failure a description is
 * available from icspp_last_error() until the next call on the same thread.
 * Matrices cross the boundary as row-major double arrays. Component indices
 * are 1-based.
 */
#ifndef ICSPP_H
#define ICSPP_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  define ICSPP_API __declspec(dllexport)
#else
#  define ICSPP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum icspp_status {
  ICSPP_OK = 0,
  ICSPP_ERR_INVALID_ARGUMENT = 1,
  ICSPP_ERR_PARSE = 2,
  ICSPP_ERR_TOO_FEW_ROWS = 3,
  ICSPP_ERR_NOT_POSITIVE_DEFINITE = 4,
  ICSPP_ERR_DIMENSION_MISMATCH = 5,
  ICSPP_ERR_INVALID_INDICES = 6,
  ICSPP_ERR_DEGENERATE_PAIRS = 7,
  ICSPP_ERR_SINGULAR_DESIGN = 8,
  ICSPP_ERR_INVALID_SPEC = 9,
  ICSPP_ERR_IO = 10,
  ICSPP_ERR_INTERNAL = 11
} icspp_status;

typedef enum icspp_mode { ICSPP_MODE_ICS_PP = 0, ICSPP_MODE_GLOBAL_PP = 1, ICSPP_MODE_ICS_ONLY = 2 } icspp_mode;

typedef enum icspp_starts {
  ICSPP_STARTS_DEFAULT = 0, /* all pairs for d = 2, ics-adjacent otherwise */
  ICSPP_STARTS_ALL_PAIRS = 1,
  ICSPP_STARTS_ICS_ADJACENT = 2,
  ICSPP_STARTS_BEST_INITIAL = 3,
  ICSPP_STARTS_EXPLICIT = 4
} icspp_starts;

typedef enum icspp_termination {
  ICSPP_TERM_GRADIENT_BELOW_THRESHOLD = 0,
  ICSPP_TERM_MAX_ITERS = 1,
  ICSPP_TERM_STEP_FLOOR = 2,
  ICSPP_TERM_NOT_OPTIMIZED = 3
} icspp_termination;

typedef enum icspp_generator_kind {
  ICSPP_GEN_CLUSTERS = 0,
  ICSPP_GEN_CIRCLE = 1,
  ICSPP_GEN_HYPERPLANES = 2,
  ICSPP_GEN_GAUSSIAN = 3
} icspp_generator_kind;

typedef enum icspp_mixing { ICSPP_MIX_NONE = 0, ICSPP_MIX_ORTHOGONAL = 1, ICSPP_MIX_NONSINGULAR = 2 } icspp_mixing;

typedef struct icspp_dataset icspp_dataset;
typedef struct icspp_config icspp_config;
typedef struct icspp_result icspp_result;
typedef struct icspp_generated icspp_generated;

typedef struct icspp_start_info {
  int restart;
  double initial_H;
  double final_H;
  int iterations;
  icspp_termination termination;
} icspp_start_info;

ICSPP_API const char* icspp_status_name(icspp_status status);
ICSPP_API const char* icspp_last_error(void);

/* Gaussian reference value of the entropy estimate for dimension d, bandwidth h. */
ICSPP_API icspp_status icspp_reference_entropy(int d, double h, double* out);

/* ---- data sets ---- */
ICSPP_API icspp_status icspp_dataset_read_csv(const char* path, int has_header, icspp_dataset** out);
ICSPP_API icspp_status icspp_dataset_from_rows(const double* rows, size_t n, size_t p, icspp_dataset** out);
ICSPP_API size_t icspp_dataset_rows(const icspp_dataset* data);
ICSPP_API size_t icspp_dataset_cols(const icspp_dataset* data);
ICSPP_API uint64_t icspp_dataset_content_hash(const icspp_dataset* data);
/* Copies n*p values, row-major. */
ICSPP_API icspp_status icspp_dataset_copy_rows(const icspp_dataset* data, double* out, size_t capacity);
ICSPP_API icspp_status icspp_dataset_write_csv(const icspp_dataset* data, const char* path);
ICSPP_API void icspp_dataset_free(icspp_dataset* data);

/* ---- configuration ---- */
ICSPP_API icspp_status icspp_config_create(icspp_config** out);
ICSPP_API void icspp_config_free(icspp_config* cfg);
ICSPP_API icspp_status icspp_config_set_d(icspp_config* cfg, int d);
ICSPP_API icspp_status icspp_config_set_mode(icspp_config* cfg, icspp_mode mode);
ICSPP_API icspp_status icspp_config_set_starts(icspp_config* cfg, icspp_starts starts);
/* `indices` holds `count` tuples of d 1-based indices each, flattened. */
ICSPP_API icspp_status icspp_config_set_explicit_starts(icspp_config* cfg, const int* indices, size_t count, int d);
ICSPP_API icspp_status icspp_config_set_bandwidth(icspp_config* cfg, double h);
ICSPP_API icspp_status icspp_config_set_nu(icspp_config* cfg, double nu);
ICSPP_API icspp_status icspp_config_set_gamma(icspp_config* cfg, double gamma);
ICSPP_API icspp_status icspp_config_set_threshold(icspp_config* cfg, double delta0);
ICSPP_API icspp_status icspp_config_set_max_iters(icspp_config* cfg, int max_outer_iters);
ICSPP_API icspp_status icspp_config_set_max_halvings(icspp_config* cfg, int max_halvings);
ICSPP_API icspp_status icspp_config_set_restarts(icspp_config* cfg, int restarts);
ICSPP_API icspp_status icspp_config_set_seed(icspp_config* cfg, uint64_t seed);
ICSPP_API icspp_status icspp_config_set_jobs(icspp_config* cfg, int jobs);
ICSPP_API icspp_status icspp_config_set_snapshot_iters(icspp_config* cfg, const int* iters, size_t count);

/* ---- pipeline ---- */
ICSPP_API icspp_status icspp_run(const icspp_dataset* data, const icspp_config* cfg, icspp_result** out);
ICSPP_API void icspp_result_free(icspp_result* result);
ICSPP_API double icspp_result_best_H(const icspp_result* result);
ICSPP_API double icspp_result_reference_H(const icspp_result* result);
ICSPP_API size_t icspp_result_start_count(const icspp_result* result);
ICSPP_API icspp_status icspp_result_start_info(const icspp_result* result, size_t k, icspp_start_info* out);
/* Writes the d 1-based indices of start k (in report order). */
ICSPP_API icspp_status icspp_result_start_indices(const icspp_result* result, size_t k, int* out, size_t capacity);
ICSPP_API icspp_status icspp_result_best_start(const icspp_result* result, icspp_start_info* info, int* indices,
                                               size_t capacity);
/* p*p values, row-major; centered raw data times B gives the final coordinates. */
ICSPP_API icspp_status icspp_result_transform(const icspp_result* result, double* out, size_t capacity);
/* n*d values, row-major. */
ICSPP_API icspp_status icspp_result_projected(const icspp_result* result, double* out, size_t capacity);
ICSPP_API int icspp_result_all_starts_capped(const icspp_result* result);
/* Writes projected.csv, transform_B.csv, manifest.json, trace.jsonl,
   splom.svg and snapshot SVGs into out_dir. */
ICSPP_API icspp_status icspp_result_write_outputs(const icspp_result* result, const char* out_dir,
                                                  const char* input_label, double total_seconds);

/* ---- synthetic data ---- */
ICSPP_API icspp_status icspp_generate(icspp_generator_kind kind, int n, int p, uint64_t seed, icspp_mixing mixing,
                                      icspp_generated** out);
ICSPP_API icspp_status icspp_generated_dataset(const icspp_generated* gen, icspp_dataset** out);
ICSPP_API icspp_status icspp_generated_write_truth(const icspp_generated* gen, const char* path);
/* Recovery score in [0, 1] of a pipeline result against the planted structure. */
ICSPP_API icspp_status icspp_generated_score(const icspp_generated* gen, const icspp_result* result, double* out);
ICSPP_API void icspp_generated_free(icspp_generated* gen);

#ifdef __cplusplus
}
#endif

#endif /* ICSPP_H */

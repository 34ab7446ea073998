#ifndef VLBRIDGE_H
#define VLBRIDGE_H

#include <stddef.h>
#include <stdint.h>

#if defined(VLB_BUILDING_LIBRARY)
#define VLB_API __attribute__((visibility("default")))
#else
#define VLB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status values are stable; 0 is success. */
typedef enum vlb_status {
  VLB_OK = 0,
  VLB_E_INVALID_ARGUMENT = 1,
  VLB_E_CONFIG = 2,
  VLB_E_IO = 3,
  VLB_E_PARSE = 4,
  VLB_E_REMOTE = 5,
  VLB_E_DEGENERATE = 6,
  VLB_E_CHECK_FAILED = 7,
  VLB_E_RUNTIME = 8
} vlb_status;

typedef struct vlb_pipeline vlb_pipeline;

/* Message of the last failed call on this thread; empty after a success.
   Valid until the next call on the same thread. */
VLB_API const char* vlb_last_error(void);

/* Process exit code for a status: 0 ok, 2 config/usage, 1 otherwise. */
VLB_API int vlb_exit_code(vlb_status status);

/* `config_json` may be NULL for the defaults. */
VLB_API vlb_status vlb_pipeline_create(const char* config_json, vlb_pipeline** out);
VLB_API vlb_status vlb_pipeline_create_from_file(const char* path, vlb_pipeline** out);
VLB_API void vlb_pipeline_destroy(vlb_pipeline* pipeline);

VLB_API vlb_status vlb_pipeline_set_seed(vlb_pipeline* pipeline, uint64_t seed);
/* Hash embedder, rule rewriter and heuristic NLI regardless of config. */
VLB_API vlb_status vlb_pipeline_force_offline(vlb_pipeline* pipeline);
/* Writes the NUL-terminated config hash; fails when `capacity` is too small. */
VLB_API vlb_status vlb_pipeline_config_hash(const vlb_pipeline* pipeline, char* buffer, size_t capacity);

VLB_API vlb_status vlb_run_augment(const vlb_pipeline* pipeline, const char* input, const char* output);
VLB_API vlb_status vlb_run_attributes(const vlb_pipeline* pipeline, const char* input, const char* output);

typedef struct vlb_train_options {
  int64_t epochs; /* < 0 keeps the default */
  double lr;      /* < 0 keeps the default */
  int grad_check; /* nonzero runs the finite-difference check */
} vlb_train_options;

VLB_API vlb_train_options vlb_train_options_default(void);
/* `options` may be NULL. */
VLB_API vlb_status vlb_run_train(const vlb_pipeline* pipeline, const char* input, const char* output,
                                 const vlb_train_options* options);
VLB_API vlb_status vlb_run_report(const char* const* inputs, size_t n_inputs, const char* output);

/* Stateless primitives. */
VLB_API vlb_status vlb_cosine(const double* a, const double* b, size_t dim, double* out);
/* Texts are tokenized with the library tokenizer. */
VLB_API vlb_status vlb_rouge_l(const char* candidate, const char* reference, double* out);
/* Bracketed trees, e.g. "(S (NP a) (VP b))". */
VLB_API vlb_status vlb_tree_edit_distance(const char* a, const char* b, size_t* out);
/* `positive_numerator` selects the variant whose numerator is the positive branch. */
VLB_API vlb_status vlb_loss_cl(double cos_pos, double cos_neg, double beta, double tau, int positive_numerator,
                               double* out);

#ifdef __cplusplus
}
#endif

#endif

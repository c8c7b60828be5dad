#ifndef TDDR_TDDR_H
#define TDDR_TDDR_H

#include <stddef.h>
#include <stdint.h>

#if defined(TDDR_BUILDING_LIBRARY)
#define TDDR_API __attribute__((visibility("default")))
#else
#define TDDR_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tddr_status {
  TDDR_OK = 0,
  TDDR_ERR_CONFIG = 1,        /* bad configuration or malformed input file */
  TDDR_ERR_USAGE = 2,         /* invalid argument */
  TDDR_ERR_PRECONDITION = 3,  /* object not in a state that allows the call */
  TDDR_ERR_IO = 4,
  TDDR_ERR_NUMERIC = 5,
  TDDR_ERR_INTERNAL = 6
} tddr_status;

typedef struct tddr_config tddr_config;
typedef struct tddr_result tddr_result;
typedef struct tddr_mdp tddr_mdp;
typedef struct tddr_trace tddr_trace;

TDDR_API const char* tddr_version(void);
TDDR_API const char* tddr_status_string(tddr_status status);
/* Message of the last failing call on this thread; "" if none. */
TDDR_API const char* tddr_last_error(void);

/* Experiment configuration. Keys are the same as in config files. */
TDDR_API tddr_status tddr_config_create(tddr_config** out);
TDDR_API tddr_status tddr_config_load(const char* path, tddr_config** out);
TDDR_API tddr_status tddr_config_set(tddr_config* cfg, const char* key, const char* value);
/* Copies the canonical value into buf (NUL-terminated, truncated to cap).
   *needed receives the full length without the terminator. */
TDDR_API tddr_status tddr_config_get(const tddr_config* cfg, const char* key, char* buf, size_t cap, size_t* needed);
TDDR_API tddr_status tddr_config_hash(const tddr_config* cfg, uint64_t* out);
TDDR_API tddr_status tddr_config_validate(const tddr_config* cfg);
TDDR_API void tddr_config_destroy(tddr_config* cfg);

/* Runs every seed of the configuration. A NaN abort is not an error here;
   check tddr_run_info.aborted. */
TDDR_API tddr_status tddr_run(const tddr_config* cfg, tddr_result** out);

typedef struct tddr_run_info {
  uint64_t seed;
  uint64_t config_hash;
  size_t evaluations;
  int64_t env_steps;
  int64_t gradient_steps;
  uint64_t parameter_fingerprint;
  double final_smoothed;
  double wall_seconds;
  int aborted;
} tddr_run_info;

TDDR_API size_t tddr_result_seed_count(const tddr_result* result);
TDDR_API tddr_status tddr_result_info(const tddr_result* result, size_t index, tddr_run_info* out);
/* Copies min(cap, evaluations) checkpoints. */
TDDR_API tddr_status tddr_result_evaluations(const tddr_result* result, size_t index, int64_t* steps,
                                             double* returns, size_t cap);
TDDR_API tddr_status tddr_result_diagnostic(const tddr_result* result, size_t index, char* buf, size_t cap,
                                            size_t* needed);
/* Aggregates the non-aborted seeds. */
TDDR_API tddr_status tddr_result_summary(const tddr_result* result, double* final_mean, double* final_std);
/* Writes seed_<seed>.csv, aggregate.csv, config.json and summary.json. */
TDDR_API tddr_status tddr_result_emit(const tddr_result* result, const char* dir);
TDDR_API void tddr_result_destroy(tddr_result* result);

/* Re-aggregates a run directory written by tddr_result_emit and rewrites
   its aggregate.csv. */
TDDR_API tddr_status tddr_aggregate_dir(const char* dir, size_t* seeds, double* final_mean, double* final_std);

TDDR_API tddr_status tddr_random_policy_return(const char* task, int episodes, uint64_t seed, double* out);

/* Finite MDPs. */
TDDR_API tddr_status tddr_mdp_random(int states, int actions, uint64_t seed, tddr_mdp** out);
TDDR_API tddr_status tddr_mdp_load(const char* path, tddr_mdp** out);
TDDR_API tddr_status tddr_mdp_save(const tddr_mdp* mdp, const char* path);
TDDR_API tddr_status tddr_mdp_shape(const tddr_mdp* mdp, int* states, int* actions, double* gamma);
/* Q* by value iteration, row-major [state][action]; cap >= states*actions. */
TDDR_API tddr_status tddr_mdp_optimal_q(const tddr_mdp* mdp, double tol, double* q, size_t cap);
TDDR_API void tddr_mdp_destroy(tddr_mdp* mdp);

typedef enum tddr_scheme { TDDR_SCHEME_MIN = 0, TDDR_SCHEME_CLASSIC = 1 } tddr_scheme;
typedef enum tddr_pattern { TDDR_PATTERN_RANDOM = 0, TDDR_PATTERN_SIMULTANEOUS = 1 } tddr_pattern;
typedef enum tddr_selector { TDDR_SELECTOR_TDDR = 0, TDDR_SELECTOR_FIXED1 = 1, TDDR_SELECTOR_FIXED2 = 2 } tddr_selector;

typedef struct tddr_converge_options {
  tddr_scheme scheme;
  tddr_pattern pattern;
  tddr_selector selector;
  int64_t steps;
  uint64_t seed;
  int64_t checkpoint_every;
  double omega;
  double epsilon_start;
  double epsilon_end;
  double init_a;
  double init_b;
} tddr_converge_options;

typedef struct tddr_trace_row {
  int64_t step;
  double delta_ba_inf;
  double delta_a_inf;
  double mean_abs_ea;
  double mean_abs_eb;
  double epsilon;
  double alpha_mean;
} tddr_trace_row;

TDDR_API void tddr_converge_defaults(tddr_converge_options* options);
TDDR_API tddr_status tddr_converge(const tddr_mdp* mdp, const tddr_converge_options* options, tddr_trace** out);
TDDR_API size_t tddr_trace_row_count(const tddr_trace* trace);
TDDR_API tddr_status tddr_trace_row_at(const tddr_trace* trace, size_t index, tddr_trace_row* out);
TDDR_API double tddr_trace_q_star_inf(const tddr_trace* trace);
TDDR_API tddr_status tddr_trace_write_csv(const tddr_trace* trace, const char* path);
TDDR_API void tddr_trace_destroy(tddr_trace* trace);

#ifdef __cplusplus
}
#endif

#endif

/* C interface to the additive functional graphical model library.
 *
 * All objects are opaque handles owned by the caller and released with the
 * matching *_free function. Every fallible call returns an afgm_status; on
 * failure afgm_last_error() describes the problem for the calling thread.
 * Strings returned through char** out-parameters are heap-allocated by the
 * library and must be released with afgm_string_free.
 */
#ifndef AFGM_H
#define AFGM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define AFGM_API __declspec(dllexport)
#else
#define AFGM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum afgm_status {
  AFGM_OK = 0,
  AFGM_ERR_INVALID_ARGUMENT = 1,
  AFGM_ERR_PRECONDITION = 2,
  AFGM_ERR_DEGENERATE = 3,
  AFGM_ERR_NUMERICAL = 4,
  AFGM_ERR_CONFIG = 5,
  AFGM_ERR_IO = 6,
  AFGM_ERR_INTERNAL = 7
} afgm_status;

typedef struct afgm_dataset afgm_dataset;
typedef struct afgm_scenario afgm_scenario;
typedef struct afgm_fit afgm_fit;
typedef struct afgm_report afgm_report;

AFGM_API const char* afgm_version(void);
AFGM_API const char* afgm_last_error(void);
AFGM_API const char* afgm_status_name(afgm_status status);
AFGM_API void afgm_string_free(char* s);

/* Datasets: long-form CSV (subject,node,time_index,value) plus a grid JSON {"points": [...]}. */
AFGM_API afgm_status afgm_dataset_read(const char* csv_path, const char* grid_path, afgm_dataset** out);
AFGM_API afgm_status afgm_dataset_dims(const afgm_dataset* ds, size_t* n, size_t* p, size_t* T);
AFGM_API afgm_status afgm_dataset_csv(const afgm_dataset* ds, char** csv);
AFGM_API afgm_status afgm_dataset_grid_json(const afgm_dataset* ds, char** json);
AFGM_API void afgm_dataset_free(afgm_dataset* ds);

/* Simulation from a scenario config JSON; seed_override < 0 keeps the config's seed. */
AFGM_API afgm_status afgm_simulate(const char* scenario_json, int64_t seed_override, afgm_scenario** out);
AFGM_API afgm_status afgm_scenario_dataset(const afgm_scenario* sc, afgm_dataset** out);
AFGM_API afgm_status afgm_scenario_truth_json(const afgm_scenario* sc, char** json);
AFGM_API afgm_status afgm_scenario_truth_csv(const afgm_scenario* sc, char** csv);
AFGM_API afgm_status afgm_scenario_dag_json(const afgm_scenario* sc, char** json);
AFGM_API afgm_status afgm_scenario_config_json(const afgm_scenario* sc, char** json);
AFGM_API void afgm_scenario_free(afgm_scenario* sc);

/* Fitting. config_json may be NULL or "{}" for defaults; threads = 0 uses all cores.
 * The dataset is centered internally when needed. */
AFGM_API afgm_status afgm_fit_run(const afgm_dataset* ds, const char* config_json, size_t threads, afgm_fit** out);
AFGM_API afgm_status afgm_fit_linear_run(const afgm_dataset* ds, const char* config_json, size_t threads,
                                         afgm_fit** out);
AFGM_API afgm_status afgm_fit_lambda_count(const afgm_fit* fit, size_t* count);
AFGM_API afgm_status afgm_fit_lambda(const afgm_fit* fit, size_t index, double* lambda);
AFGM_API afgm_status afgm_fit_select_density(const afgm_fit* fit, double density, size_t* index);
AFGM_API afgm_status afgm_fit_edge_count(const afgm_fit* fit, size_t index, size_t* count);
AFGM_API afgm_status afgm_fit_graph_json(const afgm_fit* fit, size_t index, char** json);
AFGM_API afgm_status afgm_fit_graph_csv(const afgm_fit* fit, size_t index, char** csv);
AFGM_API afgm_status afgm_fit_block_norms_csv(const afgm_fit* fit, char** csv);
/* Number of target nodes whose solve at `index` hit the sweep limit. */
AFGM_API afgm_status afgm_fit_unconverged_count(const afgm_fit* fit, size_t index, size_t* count);
/* JSON with per-node convergence, sweep counts, m_n, k_n and the resolved config. */
AFGM_API afgm_status afgm_fit_diagnostics_json(const afgm_fit* fit, char** json);
AFGM_API void afgm_fit_free(afgm_fit* fit);

/* Benchmark. methods is a comma-separated list of "afgm" and/or "linear". fit_config_json
 * may be NULL, in which case m_n is fixed to the scenario's component count. */
AFGM_API afgm_status afgm_bench_run(const char* scenario_json, const char* fit_config_json, const char* methods,
                                    size_t replicates, size_t lambdas, uint64_t seed, size_t threads,
                                    afgm_report** out);
AFGM_API afgm_status afgm_report_json(const afgm_report* rep, char** json);
AFGM_API afgm_status afgm_report_method_count(const afgm_report* rep, size_t* count);
AFGM_API afgm_status afgm_report_method_name(const afgm_report* rep, size_t method, char** name);
AFGM_API afgm_status afgm_report_mean_auc(const afgm_report* rep, size_t method, double* mean, double* se);
AFGM_API afgm_status afgm_report_replicate_count(const afgm_report* rep, size_t* count);
AFGM_API afgm_status afgm_report_roc_csv(const afgm_report* rep, size_t method, size_t replicate, char** csv);
AFGM_API void afgm_report_free(afgm_report* rep);

#ifdef __cplusplus
}
#endif

#endif /* AFGM_H */

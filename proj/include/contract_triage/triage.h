/*
 * Copyright 2026 The contract-triage Authors.
 * SPDX-License-Identifier: Apache-2.0
 */
#ifndef CONTRACT_TRIAGE_TRIAGE_H
#define CONTRACT_TRIAGE_TRIAGE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(CONTRACT_TRIAGE_BUILDING)
#    define CT_API __declspec(dllexport)
#  else
#    define CT_API __declspec(dllimport)
#  endif
#else
#  define CT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ct_status {
    CT_OK = 0,
    CT_INVALID_ARGUMENT = 1,
    CT_IO = 2,
    CT_PARSE = 3,
    CT_INSUFFICIENT_LABEL = 4,
    CT_UNKNOWN_DETECTOR = 5,
    CT_UNKNOWN_SEVERITY = 6,
    CT_MISSING_ANALYSIS = 7,
    CT_DIMENSION_MISMATCH = 8,
    CT_HTTP = 9,
    CT_NOT_VERIFIED = 10,
    CT_RATE_LIMITED = 11,
    CT_REFUSAL = 12,
    CT_TIMEOUT = 13,
    CT_TOO_MANY_VULNS = 14,
    CT_LENGTH_MISMATCH = 15,
    CT_EMPTY_NODE = 16,
    CT_EMPTY_VULN_LIST = 17,
    CT_INTERNAL = 99
} ct_status;

typedef struct ct_corpus ct_corpus;
typedef struct ct_analyzer ct_analyzer;
typedef struct ct_model ct_model;
typedef struct ct_config ct_config;

/* Library version, e.g. "0.1.0". */
CT_API const char* ct_version(void);

/* Message of the last failed call on this thread; "" when none. */
CT_API const char* ct_last_error(void);
CT_API const char* ct_status_name(ct_status status);

/* Strings returned through char** out-parameters are owned by the caller. */
CT_API void ct_string_free(char* s);

/* Corpus (JSON Lines or CSV). */
CT_API ct_status ct_corpus_load(const char* path, ct_corpus** out);
CT_API ct_status ct_corpus_save(const ct_corpus* corpus, const char* path);
CT_API ct_status ct_corpus_generate(size_t n, double malicious_ratio, uint64_t seed, ct_corpus** out);
CT_API ct_status ct_corpus_filter_analyzed(const ct_corpus* corpus, ct_corpus** out);
CT_API ct_status ct_corpus_stratified_reduce(const ct_corpus* corpus, size_t target, double malicious_ratio,
                                             uint64_t seed, ct_corpus** out);
CT_API ct_status ct_corpus_split(const ct_corpus* corpus, double train_fraction, uint64_t seed,
                                 ct_corpus** train, ct_corpus** test);
CT_API size_t ct_corpus_size(const ct_corpus* corpus);
CT_API size_t ct_corpus_count_malicious(const ct_corpus* corpus);
/* 1 malicious, 0 benign, -1 out of range. */
CT_API int ct_corpus_label(const ct_corpus* corpus, size_t index);
/* One record as a JSON line. */
CT_API ct_status ct_corpus_record_json(const ct_corpus* corpus, size_t index, char** out_json);
CT_API void ct_corpus_free(ct_corpus* corpus);

/* Analyzers. `command_template` may be NULL for the default external command. */
CT_API ct_status ct_analyzer_builtin(ct_analyzer** out);
CT_API ct_status ct_analyzer_external(const char* command_template, ct_analyzer** out);
CT_API void ct_analyzer_free(ct_analyzer* analyzer);
/* Report as JSON: {"status", "compiler_versions_used", "findings": [...]} */
CT_API ct_status ct_analyze_source(const ct_analyzer* analyzer, const char* source, char** out_json);
CT_API ct_status ct_analyze_corpus(const ct_analyzer* analyzer, ct_corpus* corpus, unsigned jobs);
CT_API ct_status ct_rewrite_pragma(const char* source, const char* version, char** out_source);

typedef struct ct_forest_params {
    uint32_t n_trees;
    int32_t max_depth;          /* < 0: unlimited */
    uint32_t min_samples_split;
    int32_t mtry;               /* <= 0: floor(sqrt(features)) */
    uint64_t seed;
    int bootstrap;
    unsigned jobs;
} ct_forest_params;

CT_API ct_forest_params ct_forest_params_default(void);

CT_API ct_status ct_model_train(const ct_corpus* train, const ct_forest_params* params, ct_model** out);
CT_API ct_status ct_model_save(const ct_model* model, const char* path);
CT_API ct_status ct_model_load(const char* path, ct_model** out);
CT_API ct_status ct_model_save_vocabulary(const ct_model* model, const char* path);
/* Writes one 0/1 prediction per record into `out` (capacity `capacity`). */
CT_API ct_status ct_model_predict(const ct_model* model, const ct_corpus* corpus, int* out, size_t capacity);
CT_API void ct_model_free(ct_model* model);

typedef struct ct_metrics {
    uint64_t tp, fp, tn, fn;
    double accuracy;
    double f1;
    double false_positive_rate;
} ct_metrics;

CT_API ct_status ct_evaluate(const int* predictions, const int* truths, size_t n, ct_metrics* out);
/* Returns CT_INVALID_ARGUMENT when `before_total` is 0. */
CT_API ct_status ct_reduction_percentage(uint64_t before_total, uint64_t after_total, double* out);

/* Pipeline configuration and runs. Keys are the CLI long-flag names. */
typedef void (*ct_log_fn)(const char* line, void* user);

CT_API ct_status ct_config_new(ct_config** out);
CT_API ct_status ct_config_set(ct_config* config, const char* key, const char* value);
CT_API ct_status ct_config_load_file(ct_config* config, const char* path);
CT_API void ct_config_set_logger(ct_config* config, ct_log_fn fn, void* user);
CT_API void ct_config_free(ct_config* config);

/* stage: fetch, generate, analyze, prepare, train, classify, evaluate, repair. */
CT_API ct_status ct_run_stage(const ct_config* config, const char* stage);
CT_API ct_status ct_run_pipeline(const ct_config* config);
/* Builds the report JSON for one source with the configured analyzer. */
CT_API ct_status ct_config_analyze_source(const ct_config* config, const char* source, char** out_json);

#ifdef __cplusplus
}
#endif

#endif

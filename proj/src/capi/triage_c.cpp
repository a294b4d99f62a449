/*
 * Copyright 2026 The contract-triage Authors.
 * SPDX-License-Identifier: Apache-2.0
 */
#include "contract_triage/triage.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "triage/analyzer.hpp"
#include "triage/corpus.hpp"
#include "triage/features.hpp"
#include "triage/forest.hpp"
#include "triage/gen.hpp"
#include "triage/pipeline.hpp"
#include "triage/report.hpp"
#include "triage/solprep.hpp"

struct ct_corpus {
    triage::Corpus records;
};

struct ct_analyzer {
    triage::Analyzer analyzer;
};

struct ct_model {
    triage::TriageModel model;
};

struct ct_config {
    triage::PipelineConfig config;
    ct_log_fn log = nullptr;
    void* log_user = nullptr;
};

namespace {

thread_local std::string g_last_error;

ct_status map_code(triage::ErrorCode code) {
    using triage::ErrorCode;
    switch (code) {
    case ErrorCode::InvalidArgument: return CT_INVALID_ARGUMENT;
    case ErrorCode::Io: return CT_IO;
    case ErrorCode::Parse: return CT_PARSE;
    case ErrorCode::InsufficientLabel: return CT_INSUFFICIENT_LABEL;
    case ErrorCode::UnknownDetector: return CT_UNKNOWN_DETECTOR;
    case ErrorCode::UnknownSeverity: return CT_UNKNOWN_SEVERITY;
    case ErrorCode::MissingAnalysis: return CT_MISSING_ANALYSIS;
    case ErrorCode::DimensionMismatch: return CT_DIMENSION_MISMATCH;
    case ErrorCode::LengthMismatch: return CT_LENGTH_MISMATCH;
    case ErrorCode::EmptyNode: return CT_EMPTY_NODE;
    case ErrorCode::EmptyVulnList: return CT_EMPTY_VULN_LIST;
    case ErrorCode::TooManyVulns: return CT_TOO_MANY_VULNS;
    case ErrorCode::Http: return CT_HTTP;
    case ErrorCode::NotVerified: return CT_NOT_VERIFIED;
    case ErrorCode::RateLimited: return CT_RATE_LIMITED;
    case ErrorCode::Refusal: return CT_REFUSAL;
    case ErrorCode::Timeout: return CT_TIMEOUT;
    case ErrorCode::Internal: return CT_INTERNAL;
    }
    return CT_INTERNAL;
}

template <typename Fn>
ct_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return CT_OK;
    } catch (const triage::Error& e) {
        g_last_error = e.what();
        return map_code(e.code());
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return CT_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return CT_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return CT_INTERNAL;
    }
}

void require(bool ok, const char* what) {
    if (!ok) throw triage::Error(triage::ErrorCode::InvalidArgument, std::string(what) + " must not be NULL");
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.data(), s.size() + 1);
    return out;
}

triage::Pipeline make_pipeline(const ct_config* config) {
    triage::LogSink sink;
    if (config->log) {
        sink = [fn = config->log, user = config->log_user](std::string_view line) {
            fn(std::string(line).c_str(), user);
        };
    }
    return triage::Pipeline(config->config, sink);
}

} // namespace

extern "C" {

const char* ct_version(void) { return CONTRACT_TRIAGE_VERSION; }

const char* ct_last_error(void) { return g_last_error.c_str(); }

const char* ct_status_name(ct_status status) {
    switch (status) {
    case CT_OK: return "Ok";
    case CT_INVALID_ARGUMENT: return "InvalidArgument";
    case CT_IO: return "IoError";
    case CT_PARSE: return "ParseError";
    case CT_INSUFFICIENT_LABEL: return "InsufficientLabel";
    case CT_UNKNOWN_DETECTOR: return "UnknownDetector";
    case CT_UNKNOWN_SEVERITY: return "UnknownSeverity";
    case CT_MISSING_ANALYSIS: return "MissingAnalysis";
    case CT_DIMENSION_MISMATCH: return "DimensionMismatch";
    case CT_HTTP: return "HttpError";
    case CT_NOT_VERIFIED: return "NotVerified";
    case CT_RATE_LIMITED: return "RateLimited";
    case CT_REFUSAL: return "RefusalError";
    case CT_TIMEOUT: return "TimeoutError";
    case CT_TOO_MANY_VULNS: return "TooManyVulns";
    case CT_LENGTH_MISMATCH: return "LengthMismatch";
    case CT_EMPTY_NODE: return "EmptyNode";
    case CT_EMPTY_VULN_LIST: return "EmptyVulnList";
    case CT_INTERNAL: return "Internal";
    }
    return "Unknown";
}

void ct_string_free(char* s) { std::free(s); }

ct_status ct_corpus_load(const char* path, ct_corpus** out) {
    return guarded([&] {
        require(path && out, "path/out");
        *out = new ct_corpus{triage::load_any(path)};
    });
}

ct_status ct_corpus_save(const ct_corpus* corpus, const char* path) {
    return guarded([&] {
        require(corpus && path, "corpus/path");
        triage::save_corpus(corpus->records, path);
    });
}

ct_status ct_corpus_generate(size_t n, double malicious_ratio, uint64_t seed, ct_corpus** out) {
    return guarded([&] {
        require(out, "out");
        *out = new ct_corpus{triage::generate_corpus(n, malicious_ratio, seed)};
    });
}

ct_status ct_corpus_filter_analyzed(const ct_corpus* corpus, ct_corpus** out) {
    return guarded([&] {
        require(corpus && out, "corpus/out");
        *out = new ct_corpus{triage::filter_analyzed(corpus->records)};
    });
}

ct_status ct_corpus_stratified_reduce(const ct_corpus* corpus, size_t target, double malicious_ratio,
                                      uint64_t seed, ct_corpus** out) {
    return guarded([&] {
        require(corpus && out, "corpus/out");
        *out = new ct_corpus{triage::stratified_reduce(corpus->records, target, malicious_ratio, seed)};
    });
}

ct_status ct_corpus_split(const ct_corpus* corpus, double train_fraction, uint64_t seed, ct_corpus** train,
                          ct_corpus** test) {
    return guarded([&] {
        require(corpus && train && test, "corpus/train/test");
        if (!(train_fraction >= 0.0 && train_fraction <= 1.0)) {
            throw triage::Error(triage::ErrorCode::InvalidArgument, "train fraction must lie in [0, 1]");
        }
        auto split = triage::train_test_split(corpus->records, train_fraction, seed);
        auto tr = std::make_unique<ct_corpus>(ct_corpus{std::move(split.train)});
        auto te = std::make_unique<ct_corpus>(ct_corpus{std::move(split.test)});
        *train = tr.release();
        *test = te.release();
    });
}

size_t ct_corpus_size(const ct_corpus* corpus) { return corpus ? corpus->records.size() : 0; }

size_t ct_corpus_count_malicious(const ct_corpus* corpus) {
    return corpus ? triage::count_malicious(corpus->records) : 0;
}

int ct_corpus_label(const ct_corpus* corpus, size_t index) {
    if (!corpus || index >= corpus->records.size()) return -1;
    return corpus->records[index].malicious ? 1 : 0;
}

ct_status ct_corpus_record_json(const ct_corpus* corpus, size_t index, char** out_json) {
    return guarded([&] {
        require(corpus && out_json, "corpus/out_json");
        if (index >= corpus->records.size()) {
            throw triage::Error(triage::ErrorCode::InvalidArgument, "record index out of range");
        }
        *out_json = dup_string(triage::record_to_json_line(corpus->records[index]));
    });
}

void ct_corpus_free(ct_corpus* corpus) { delete corpus; }

ct_status ct_analyzer_builtin(ct_analyzer** out) {
    return guarded([&] {
        require(out, "out");
        *out = new ct_analyzer{triage::Analyzer::builtin()};
    });
}

ct_status ct_analyzer_external(const char* command_template, ct_analyzer** out) {
    return guarded([&] {
        require(out, "out");
        std::string tmpl = command_template ? command_template : std::string(triage::kDefaultAnalyzerCommand);
        *out = new ct_analyzer{triage::Analyzer::external(std::move(tmpl))};
    });
}

void ct_analyzer_free(ct_analyzer* analyzer) { delete analyzer; }

ct_status ct_analyze_source(const ct_analyzer* analyzer, const char* source, char** out_json) {
    return guarded([&] {
        require(analyzer && source && out_json, "analyzer/source/out_json");
        *out_json = dup_string(triage::report_to_json(analyzer->analyzer.analyze(source)));
    });
}

ct_status ct_analyze_corpus(const ct_analyzer* analyzer, ct_corpus* corpus, unsigned jobs) {
    return guarded([&] {
        require(analyzer && corpus, "analyzer/corpus");
        triage::analyze_corpus(corpus->records, analyzer->analyzer, jobs);
    });
}

ct_status ct_rewrite_pragma(const char* source, const char* version, char** out_source) {
    return guarded([&] {
        require(source && version && out_source, "source/version/out_source");
        *out_source = dup_string(triage::rewrite_pragma(source, version));
    });
}

ct_forest_params ct_forest_params_default(void) {
    const triage::ForestParams d;
    ct_forest_params p{};
    p.n_trees = d.n_trees;
    p.max_depth = -1;
    p.min_samples_split = d.min_samples_split;
    p.mtry = 0;
    p.seed = d.seed;
    p.bootstrap = d.bootstrap ? 1 : 0;
    p.jobs = d.jobs;
    return p;
}

ct_status ct_model_train(const ct_corpus* train, const ct_forest_params* params, ct_model** out) {
    return guarded([&] {
        require(train && out, "train/out");
        const auto p = params ? *params : ct_forest_params_default();
        triage::ForestParams fp;
        fp.n_trees = p.n_trees;
        if (p.max_depth >= 0) fp.max_depth = static_cast<std::uint32_t>(p.max_depth);
        fp.min_samples_split = p.min_samples_split;
        if (p.mtry > 0) fp.mtry = static_cast<std::uint32_t>(p.mtry);
        fp.seed = p.seed;
        fp.bootstrap = p.bootstrap != 0;
        fp.jobs = p.jobs;
        auto model = std::make_unique<ct_model>();
        model->model.vocabulary = triage::build_vocabulary(train->records);
        std::vector<triage::FeatureVector> vectors;
        vectors.reserve(train->records.size());
        for (const auto& r : train->records) vectors.push_back(triage::vectorize(r, model->model.vocabulary));
        model->model.forest = triage::train_forest(vectors, fp);
        *out = model.release();
    });
}

ct_status ct_model_save(const ct_model* model, const char* path) {
    return guarded([&] {
        require(model && path, "model/path");
        model->model.save(path);
    });
}

ct_status ct_model_load(const char* path, ct_model** out) {
    return guarded([&] {
        require(path && out, "path/out");
        *out = new ct_model{triage::TriageModel::load(path)};
    });
}

ct_status ct_model_save_vocabulary(const ct_model* model, const char* path) {
    return guarded([&] {
        require(model && path, "model/path");
        model->model.vocabulary.save(path);
    });
}

ct_status ct_model_predict(const ct_model* model, const ct_corpus* corpus, int* out, size_t capacity) {
    return guarded([&] {
        require(model && corpus && out, "model/corpus/out");
        if (capacity < corpus->records.size()) {
            throw triage::Error(triage::ErrorCode::InvalidArgument, "output buffer too small");
        }
        for (std::size_t i = 0; i < corpus->records.size(); ++i) {
            out[i] = model->model.classify(corpus->records[i]) ? 1 : 0;
        }
    });
}

void ct_model_free(ct_model* model) { delete model; }

ct_status ct_evaluate(const int* predictions, const int* truths, size_t n, ct_metrics* out) {
    return guarded([&] {
        require((predictions && truths) || n == 0, "predictions/truths");
        require(out, "out");
        std::vector<bool> p(n), t(n);
        for (std::size_t i = 0; i < n; ++i) {
            p[i] = predictions[i] != 0;
            t[i] = truths[i] != 0;
        }
        const auto m = triage::evaluate_metrics(p, t);
        *out = ct_metrics{m.tp, m.fp, m.tn, m.fn, m.accuracy, m.f1, m.false_positive_rate};
    });
}

ct_status ct_reduction_percentage(uint64_t before_total, uint64_t after_total, double* out) {
    return guarded([&] {
        require(out, "out");
        triage::ImpactHistogram before, after;
        before.counts[0] = before_total;
        after.counts[0] = after_total;
        const auto r = triage::reduction_percentage(before, after);
        if (!r) throw triage::Error(triage::ErrorCode::InvalidArgument, "no findings before repair");
        *out = *r;
    });
}

ct_status ct_config_new(ct_config** out) {
    return guarded([&] {
        require(out, "out");
        *out = new ct_config{};
    });
}

ct_status ct_config_set(ct_config* config, const char* key, const char* value) {
    return guarded([&] {
        require(config && key && value, "config/key/value");
        config->config.set(key, value);
    });
}

ct_status ct_config_load_file(ct_config* config, const char* path) {
    return guarded([&] {
        require(config && path, "config/path");
        config->config.load_file(path);
    });
}

void ct_config_set_logger(ct_config* config, ct_log_fn fn, void* user) {
    if (!config) return;
    config->log = fn;
    config->log_user = user;
}

void ct_config_free(ct_config* config) { delete config; }

ct_status ct_run_stage(const ct_config* config, const char* stage) {
    return guarded([&] {
        require(config && stage, "config/stage");
        make_pipeline(config).run_stage(stage);
    });
}

ct_status ct_run_pipeline(const ct_config* config) {
    return guarded([&] {
        require(config, "config");
        make_pipeline(config).run_all();
    });
}

ct_status ct_config_analyze_source(const ct_config* config, const char* source, char** out_json) {
    return guarded([&] {
        require(config && source && out_json, "config/source/out_json");
        *out_json = dup_string(triage::report_to_json(make_pipeline(config).analyze_source(source)));
    });
}

} // extern "C"

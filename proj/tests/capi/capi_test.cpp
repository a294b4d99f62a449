/*
 * Copyright 2026 The contract-triage Authors.
 * SPDX-License-Identifier: Apache-2.0
 */
#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "contract_triage/triage.h"

namespace {

std::string take(char* s) {
    std::string out = s ? s : "";
    ct_string_free(s);
    return out;
}

} // namespace

TEST(CApi, VersionAndNames) {
    EXPECT_STRNE(ct_version(), "");
    EXPECT_STREQ(ct_status_name(CT_REFUSAL), "RefusalError");
    EXPECT_STREQ(ct_status_name(CT_OK), "Ok");
}

TEST(CApi, NullArgumentsReportErrors) {
    EXPECT_EQ(ct_corpus_generate(10, 0.2, 1, nullptr), CT_INVALID_ARGUMENT);
    EXPECT_STRNE(ct_last_error(), "");
    ct_corpus* corpus = nullptr;
    EXPECT_EQ(ct_corpus_load("/definitely/not/here.jsonl", &corpus), CT_IO);
    EXPECT_EQ(corpus, nullptr);
}

TEST(CApi, TrainPredictEvaluate) {
    ct_corpus* corpus = nullptr;
    ASSERT_EQ(ct_corpus_generate(100, 0.3, 5, &corpus), CT_OK);
    EXPECT_EQ(ct_corpus_size(corpus), 100u);
    EXPECT_EQ(ct_corpus_count_malicious(corpus), 30u);
    EXPECT_EQ(ct_corpus_label(corpus, 1000), -1);

    ct_analyzer* analyzer = nullptr;
    ASSERT_EQ(ct_analyzer_builtin(&analyzer), CT_OK);
    ASSERT_EQ(ct_analyze_corpus(analyzer, corpus, 2), CT_OK);

    ct_corpus *train = nullptr, *test = nullptr;
    ASSERT_EQ(ct_corpus_split(corpus, 0.6, 5, &train, &test), CT_OK);
    EXPECT_EQ(ct_corpus_size(train) + ct_corpus_size(test), 100u);

    auto params = ct_forest_params_default();
    params.n_trees = 20;
    ct_model* model = nullptr;
    ASSERT_EQ(ct_model_train(train, &params, &model), CT_OK);

    const auto n = ct_corpus_size(test);
    std::vector<int> predictions(n), truths(n);
    ASSERT_EQ(ct_model_predict(model, test, predictions.data(), n), CT_OK);
    EXPECT_EQ(ct_model_predict(model, test, predictions.data(), 0), CT_INVALID_ARGUMENT);
    for (std::size_t i = 0; i < n; ++i) truths[i] = ct_corpus_label(test, i);
    ct_metrics m{};
    ASSERT_EQ(ct_evaluate(predictions.data(), truths.data(), n, &m), CT_OK);
    EXPECT_EQ(m.tp + m.fp + m.tn + m.fn, n);
    EXPECT_GE(m.accuracy, 0.8);

    const auto path = (std::filesystem::temp_directory_path() / "capi-model.txt").string();
    ASSERT_EQ(ct_model_save(model, path.c_str()), CT_OK);
    ct_model* loaded = nullptr;
    ASSERT_EQ(ct_model_load(path.c_str(), &loaded), CT_OK);
    std::vector<int> again(n);
    ASSERT_EQ(ct_model_predict(loaded, test, again.data(), n), CT_OK);
    EXPECT_EQ(again, predictions);

    ct_model_free(loaded);
    ct_model_free(model);
    ct_corpus_free(train);
    ct_corpus_free(test);
    ct_analyzer_free(analyzer);
    ct_corpus_free(corpus);
}

TEST(CApi, AnalyzeAndRewrite) {
    ct_analyzer* analyzer = nullptr;
    ASSERT_EQ(ct_analyzer_builtin(&analyzer), CT_OK);
    char* json = nullptr;
    ASSERT_EQ(ct_analyze_source(analyzer, "contract A { function f() public { require(tx.origin == msg.sender); } }",
                                &json),
              CT_OK);
    EXPECT_NE(take(json).find("tx-origin"), std::string::npos);
    ct_analyzer_free(analyzer);

    char* rewritten = nullptr;
    ASSERT_EQ(ct_rewrite_pragma("pragma solidity ^0.4.24;\ncontract A {}\n", "0.5.17", &rewritten), CT_OK);
    EXPECT_EQ(take(rewritten), "pragma solidity >=0.5.17;\ncontract A {}\n");
}

TEST(CApi, Metrics) {
    double r = 0;
    ASSERT_EQ(ct_reduction_percentage(40, 1, &r), CT_OK);
    EXPECT_DOUBLE_EQ(r, 0.975);
    EXPECT_EQ(ct_reduction_percentage(0, 0, &r), CT_INVALID_ARGUMENT);
    EXPECT_EQ(ct_evaluate(nullptr, nullptr, 0, nullptr), CT_INVALID_ARGUMENT);
}

TEST(CApi, ConfigAndPipeline) {
    ct_config* config = nullptr;
    ASSERT_EQ(ct_config_new(&config), CT_OK);
    EXPECT_EQ(ct_config_set(config, "bogus", "1"), CT_INVALID_ARGUMENT);
    const auto out = std::filesystem::temp_directory_path() / "capi-pipeline";
    std::filesystem::remove_all(out);
    ASSERT_EQ(ct_config_set(config, "out", out.string().c_str()), CT_OK);
    ASSERT_EQ(ct_config_set(config, "generate", "80"), CT_OK);
    ASSERT_EQ(ct_config_set(config, "trees", "15"), CT_OK);
    int lines = 0;
    ct_config_set_logger(
        config, [](const char*, void* user) { ++*static_cast<int*>(user); }, &lines);
    ASSERT_EQ(ct_run_pipeline(config), CT_OK) << ct_last_error();
    EXPECT_GT(lines, 0);
    EXPECT_TRUE(std::filesystem::exists(out / "summary.json"));
    EXPECT_EQ(ct_run_stage(config, "nope"), CT_INVALID_ARGUMENT);
    ct_config_free(config);
}

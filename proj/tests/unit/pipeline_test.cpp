/*
 * Copyright 2026 The contract-triage Authors.
 * SPDX-License-Identifier: Apache-2.0
 */
#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "fakes.hpp"
#include "triage/error.hpp"
#include "triage/pipeline.hpp"

using namespace triage;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
    const auto dir = fs::temp_directory_path() / ("triage-pipeline-" + tag);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

PipelineConfig small_run(const std::string& tag) {
    PipelineConfig c;
    c.out_dir = fresh_dir(tag);
    c.generate_count = 120;
    c.malicious_ratio = 0.25;
    c.seed = 11;
    c.forest.n_trees = 25;
    return c;
}

// Counts how many transports the pipeline asks for; offline runs must ask for none.
struct CountingFactory {
    std::shared_ptr<int> made = std::make_shared<int>(0);
    TransportFactory factory() const {
        return [made = made](std::chrono::milliseconds) -> std::unique_ptr<HttpTransport> {
            ++*made;
            return std::make_unique<fakes::Transport>();
        };
    }
};

} // namespace

TEST(Config, SetKnownKeys) {
    PipelineConfig c;
    c.set("seed", "42");
    c.set("jobs", "3");
    c.set("mode", "external");
    c.set("llm", "endpoint");
    c.set("trees", "9");
    c.set("ratio", "0.3");
    c.set("fetch", "true");
    c.set("fetch-interval-ms", "250");
    EXPECT_EQ(c.seed, 42u);
    EXPECT_EQ(c.jobs, 3u);
    EXPECT_EQ(c.analyzer_mode, AnalyzerMode::External);
    EXPECT_EQ(c.llm_mode, LlmMode::Endpoint);
    EXPECT_EQ(c.forest.n_trees, 9u);
    EXPECT_DOUBLE_EQ(c.malicious_ratio, 0.3);
    EXPECT_TRUE(c.fetch_enabled);
    EXPECT_EQ(c.fetch.min_interval.count(), 250);
}

TEST(Config, RejectsBadInput) {
    PipelineConfig c;
    EXPECT_THROW(c.set("no-such-key", "1"), Error);
    EXPECT_THROW(c.set("seed", "abc"), Error);
    EXPECT_THROW(c.set("mode", "magic"), Error);
    EXPECT_THROW(c.set("ratio", "1.5"), Error);
}

TEST(Config, EveryKeyIsSettable) {
    EXPECT_GE(PipelineConfig::keys().size(), 25u);
}

TEST(Config, LoadFileThenOverride) {
    const auto dir = fresh_dir("cfg");
    fs::create_directories(dir);
    std::ofstream(dir / "run.conf") << "# comment\nseed = 5\ntrees=7\n\nllm-model = local-model\n";
    PipelineConfig c;
    c.load_file(dir / "run.conf");
    EXPECT_EQ(c.seed, 5u);
    EXPECT_EQ(c.forest.n_trees, 7u);
    EXPECT_EQ(c.chat.model, "local-model");
    c.set("seed", "6");
    EXPECT_EQ(c.seed, 6u);

    std::ofstream(dir / "bad.conf") << "seed = 1\nthis line is wrong\n";
    try {
        c.load_file(dir / "bad.conf");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Parse);
        EXPECT_EQ(e.detail(), 2);
    }
}

TEST(Pipeline, OfflineRunWritesEveryStageFile) {
    const auto config = small_run("offline");
    CountingFactory counter;
    Pipeline pipeline(config, {}, counter.factory());
    pipeline.run_all();
    EXPECT_EQ(*counter.made, 0);
    for (auto name : {stage_files::kGenerated, stage_files::kAnalyzed, stage_files::kPrepared, stage_files::kTrain,
                      stage_files::kTest, stage_files::kModel, stage_files::kVocabulary, stage_files::kPredictions,
                      stage_files::kMetrics, stage_files::kSessions}) {
        EXPECT_TRUE(fs::exists(config.out_dir / name)) << name;
    }
    for (auto name : {"summary.json", "contracts.csv", "impact_chart.svg"}) {
        EXPECT_TRUE(fs::exists(config.out_dir / name)) << name;
    }
    const auto summary = nlohmann::json::parse(slurp(config.out_dir / "summary.json"));
    EXPECT_FALSE(summary["classifier_metrics"].is_null());
    EXPECT_GT(summary["sessions"].get<int>(), 0);
    EXPECT_EQ(summary["histogram_after"]["HIGH"], 0);
}

TEST(Pipeline, StagesRunIndividually) {
    const auto config = small_run("stages");
    std::vector<std::string> lines;
    Pipeline pipeline(config, [&](std::string_view l) { lines.emplace_back(l); });
    for (auto stage : {"generate", "analyze", "prepare", "train", "classify", "evaluate"}) pipeline.run_stage(stage);
    EXPECT_TRUE(fs::exists(config.out_dir / stage_files::kMetrics));
    EXPECT_FALSE(lines.empty());
    EXPECT_THROW(pipeline.run_stage("dance"), Error);
}

TEST(Pipeline, MissingUpstreamFails) {
    Pipeline pipeline(small_run("missing"));
    EXPECT_THROW(pipeline.run_stage("train"), Error);
}

TEST(Pipeline, RepairAllCoversEveryMaliciousRecord) {
    auto config = small_run("repair-all");
    config.repair_all = true;
    Pipeline(config).run_all();
    const auto sessions = slurp(config.out_dir / stage_files::kSessions);
    EXPECT_EQ(std::count(sessions.begin(), sessions.end(), '\n'), 30);
}

TEST(Pipeline, JobsDoNotChangeOutputs) {
    auto a = small_run("jobs1");
    auto b = small_run("jobs4");
    b.jobs = 4;
    b.forest.jobs = 4;
    Pipeline(a).run_all();
    Pipeline(b).run_all();
    for (auto name : {"summary.json", "predictions.csv", "model.txt", "sessions.jsonl", "analyzed.jsonl"}) {
        EXPECT_EQ(slurp(a.out_dir / name), slurp(b.out_dir / name)) << name;
    }
}

TEST(Pipeline, AnalyzeSourceUsesConfiguredAnalyzer) {
    Pipeline pipeline(PipelineConfig{});
    const auto r = pipeline.analyze_source(generate_contract_with(1, {"timestamp"}).source);
    EXPECT_EQ(r.detector_names(), std::vector<std::string>{"timestamp"});
}

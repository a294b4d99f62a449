/*
 * Copyright 2026 The contract-triage Authors.
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "triage/forest.hpp"
#include "triage/ingest.hpp"
#include "triage/net.hpp"
#include "triage/repair.hpp"

namespace triage {

enum class AnalyzerMode { Builtin, External };
enum class LlmMode { Mock, Endpoint };

/// Everything a run needs. Defaults are fully offline: built-in detectors and
/// the mock repairer, no subprocesses and no sockets.
struct PipelineConfig {
    std::filesystem::path out_dir = "out";
    std::optional<std::filesystem::path> input;
    std::uint64_t seed = 1;
    unsigned jobs = 1;

    AnalyzerMode analyzer_mode = AnalyzerMode::Builtin;
    std::string analyzer_command{kDefaultAnalyzerCommand};

    LlmMode llm_mode = LlmMode::Mock;
    ChatConfig chat;

    std::optional<std::filesystem::path> snippets_dir;

    std::size_t generate_count = 0;
    double malicious_ratio = 0.2;
    std::size_t target_size = 0;  // 0: largest size the ratio allows

    FetchConfig fetch;
    bool fetch_enabled = false;

    double train_fraction = 0.6;
    ForestParams forest;

    std::uint32_t max_attempts = kDefaultMaxAttempts;
    bool repair_all = false;

    /// Flat key/value setter shared by the config file and the C API. Keys
    /// use the CLI's long-flag spelling ("trees", "llm-model", ...).
    /// Throws Error(InvalidArgument) for unknown keys or bad values.
    void set(std::string_view key, std::string_view value);

    /// `key = value` lines; blank lines and lines starting with '#' ignored.
    /// Throws Error(Io) / Error(Parse, detail = line).
    void load_file(const std::filesystem::path& path);

    static std::vector<std::string> keys();
};

inline constexpr std::string_view kStages[] = {"fetch", "generate", "analyze",  "prepare", "train",
                                               "classify", "evaluate", "repair"};

/// Canonical stage files inside out_dir.
namespace stage_files {
inline constexpr std::string_view kFetched = "fetched.jsonl";
inline constexpr std::string_view kGenerated = "generated.jsonl";
inline constexpr std::string_view kAnalyzed = "analyzed.jsonl";
inline constexpr std::string_view kPrepared = "prepared.jsonl";
inline constexpr std::string_view kTrain = "train.jsonl";
inline constexpr std::string_view kTest = "test.jsonl";
inline constexpr std::string_view kModel = "model.txt";
inline constexpr std::string_view kVocabulary = "vocabulary.txt";
inline constexpr std::string_view kPredictions = "predictions.csv";
inline constexpr std::string_view kMetrics = "metrics.json";
inline constexpr std::string_view kSessions = "sessions.jsonl";
}  // namespace stage_files

using LogSink = std::function<void(std::string_view line)>;
using TransportFactory = std::function<std::unique_ptr<HttpTransport>(std::chrono::milliseconds timeout)>;

/// Runs stages against files in config.out_dir. Each stage reads the previous
/// stage's canonical file (or config.input) and writes its own.
class Pipeline {
public:
    explicit Pipeline(PipelineConfig config, LogSink log = {},
                      TransportFactory transports = make_http_transport);

    /// Throws Error with the stage name prefixed to the message.
    void run_stage(std::string_view stage);
    /// fetch/generate (when configured) -> analyze -> prepare -> train ->
    /// classify -> evaluate -> repair (which also writes the report).
    void run_all();

    /// Analyzes a single source with the configured analyzer.
    AnalysisReport analyze_source(std::string_view source) const;

    const PipelineConfig& config() const noexcept { return config_; }

private:
    void stage_fetch();
    void stage_generate();
    void stage_analyze();
    void stage_prepare();
    void stage_train();
    void stage_classify();
    void stage_evaluate();
    void stage_repair();

    std::filesystem::path file(std::string_view name) const;
    /// config.input the first time it is asked for, then the first existing
    /// candidate under out_dir.
    std::filesystem::path input_or(std::initializer_list<std::string_view> candidates);
    Analyzer make_analyzer() const;
    const SnippetBank& bank() const;
    void log(const std::string& line) const;

    PipelineConfig config_;
    LogSink log_;
    TransportFactory transports_;
    std::unique_ptr<SnippetBank> custom_bank_;
    bool input_consumed_ = false;
    std::optional<std::filesystem::path> upstream_;  // fetch/generate output of this run
};

} // namespace triage

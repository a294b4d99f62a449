/*
 * Copyright 2026 The contract-triage Authors.
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "triage/corpus.hpp"
#include "triage/severity.hpp"

namespace triage {

struct Finding {
    std::string detector;
    Severity impact = Severity::Informational;
    Severity confidence = Severity::Medium;

    friend bool operator==(const Finding&, const Finding&) = default;
};

struct AnalysisReport {
    enum class Status { Ok, Null };

    Status status = Status::Ok;
    std::vector<std::string> compiler_versions_used;
    std::vector<Finding> findings;

    static AnalysisReport null_report() { return {Status::Null, {}, {}}; }
    bool ok() const noexcept { return status == Status::Ok; }
    std::vector<std::string> detector_names() const;

    friend bool operator==(const AnalysisReport&, const AnalysisReport&) = default;
};

struct DetectorInfo {
    Severity impact;
    Severity confidence;
    friend bool operator==(const DetectorInfo&, const DetectorInfo&) = default;
};

class DetectorRegistry {
public:
    DetectorRegistry() = default;
    explicit DetectorRegistry(std::map<std::string, DetectorInfo> entries);

    /// The five detectors implemented by analyze_builtin.
    static const DetectorRegistry& builtin();

    /// JSON object: name -> {"impact": LEVEL, "confidence": LEVEL}.
    static DetectorRegistry load(const std::filesystem::path& path);

    const DetectorInfo* find(std::string_view name) const;
    /// Throws Error(UnknownDetector).
    const DetectorInfo& at(std::string_view name) const;
    void add(std::string name, DetectorInfo info);
    std::size_t size() const noexcept { return entries_.size(); }
    const std::map<std::string, DetectorInfo, std::less<>>& entries() const noexcept {
        return entries_;
    }

private:
    std::map<std::string, DetectorInfo, std::less<>> entries_;
};

struct EnrichedSeverities {
    std::vector<Severity> impacts;
    std::vector<Severity> confidences;
};

/// Positionally aligned impact/confidence lists. Throws Error(UnknownDetector).
EnrichedSeverities enrich_findings(const std::vector<std::string>& names,
                                   const DetectorRegistry& registry);

/// Reads results.detectors[*].{check, impact, confidence} from an external
/// analyzer's JSON report. Duplicates are preserved.
std::vector<Finding> parse_external_report(std::string_view report_text);

/// Outcome of one external-analyzer invocation for one compiler version.
struct InvocationResult {
    bool compiled = false;
    std::vector<Finding> findings;
};

/// Runs the external analyzer on (rewritten source, compiler version).
using ExternalInvoker =
    std::function<InvocationResult(std::string_view source, std::string_view version)>;

/// Rewrites the pragma for each ladder version, invokes the analyzer, and
/// unions findings by detector name across the versions that compiled.
/// Zero successful versions yields a Null report.
AnalysisReport analyze_multi_version(std::string_view source,
                                     const std::vector<std::string>& ladder,
                                     const ExternalInvoker& run);

std::vector<std::string> default_ladder();

/// Offline heuristic detectors (reentrancy-eth, suicidal, timestamp,
/// tx-origin, unchecked-send) over comment/string-stripped source.
AnalysisReport analyze_builtin(std::string_view source);

/// Subprocess invoker. `command_template` may contain {file} and
/// {solc_version}; the rewritten source is written to a temporary file.
class SubprocessInvoker {
public:
    explicit SubprocessInvoker(std::string command_template);
    InvocationResult operator()(std::string_view source, std::string_view version) const;

    /// Classifies raw process output. Nonzero exit with no detector entries is
    /// a compile failure; so is unparseable output.
    static InvocationResult interpret(int exit_status, std::string_view stdout_text);

    const std::string& command_template() const noexcept { return template_; }

private:
    std::string template_;
};

inline constexpr std::string_view kDefaultAnalyzerCommand =
    "SOLC_VERSION={solc_version} slither {file} --json -";

/// Either the built-in detectors or an external command run across the ladder.
class Analyzer {
public:
    static Analyzer builtin();
    static Analyzer external(std::string command_template);
    static Analyzer external(ExternalInvoker invoker);

    AnalysisReport analyze(std::string_view source) const;
    bool is_builtin() const noexcept { return !invoker_; }

private:
    ExternalInvoker invoker_;
    std::vector<std::string> ladder_ = default_ladder();
};

/// Writes the report's findings into the record (or nulls them for Null status).
void apply_report(ContractRecord& record, const AnalysisReport& report);

/// Analyzes every record in place on up to `jobs` threads.
void analyze_corpus(Corpus& records, const Analyzer& analyzer, unsigned jobs,
                    bool only_unanalyzed = false);

/// Rebuilds the report a record carries (status Ok). Requires analyzed().
AnalysisReport report_from_record(const ContractRecord& record);

std::string report_to_json(const AnalysisReport& report);

} // namespace triage

/*
 * Copyright 2026 The contract-triage Authors.
 * SPDX-License-Identifier: Apache-2.0
 */
#include "triage/analyzer.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cstdio>
#include <fstream>
#include <set>

#include <json.hpp>

#include "triage/error.hpp"
#include "triage/parallel.hpp"
#include "triage/solprep.hpp"

namespace triage {

using json = nlohmann::json;

std::vector<std::string> AnalysisReport::detector_names() const {
    std::vector<std::string> names;
    names.reserve(findings.size());
    for (const auto& f : findings) names.push_back(f.detector);
    return names;
}

DetectorRegistry::DetectorRegistry(std::map<std::string, DetectorInfo> entries)
    : entries_(entries.begin(), entries.end()) {}

const DetectorRegistry& DetectorRegistry::builtin() {
    static const DetectorRegistry registry({
        {"reentrancy-eth", {Severity::High, Severity::Medium}},
        {"suicidal", {Severity::High, Severity::High}},
        {"timestamp", {Severity::Low, Severity::Medium}},
        {"tx-origin", {Severity::Medium, Severity::Medium}},
        {"unchecked-send", {Severity::Medium, Severity::Medium}},
    });
    return registry;
}

DetectorRegistry DetectorRegistry::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open registry " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Parse, path.string() + ": " + e.what());
    }
    if (!j.is_object()) throw Error(ErrorCode::Parse, path.string() + ": registry must be a JSON object");
    DetectorRegistry registry;
    for (const auto& [detector, info] : j.items()) {
        if (!info.is_object() || !info.contains("impact") || !info.contains("confidence") ||
            !info["impact"].is_string() || !info["confidence"].is_string()) {
            throw Error(ErrorCode::Parse, path.string() + ": entry '" + detector + "' needs impact and confidence");
        }
        registry.add(detector, {severity_from_name(info["impact"].get<std::string>()),
                                severity_from_name(info["confidence"].get<std::string>())});
    }
    return registry;
}

const DetectorInfo* DetectorRegistry::find(std::string_view name) const {
    auto it = entries_.find(name);
    return it == entries_.end() ? nullptr : &it->second;
}

const DetectorInfo& DetectorRegistry::at(std::string_view name) const {
    if (const auto* info = find(name)) return *info;
    throw Error(ErrorCode::UnknownDetector, "UnknownDetector(" + std::string(name) + ")");
}

void DetectorRegistry::add(std::string name, DetectorInfo info) {
    if (name.empty()) throw Error(ErrorCode::InvalidArgument, "detector name must not be empty");
    entries_.insert_or_assign(std::move(name), info);
}

EnrichedSeverities enrich_findings(const std::vector<std::string>& names, const DetectorRegistry& registry) {
    EnrichedSeverities out;
    out.impacts.reserve(names.size());
    out.confidences.reserve(names.size());
    for (const auto& n : names) {
        const auto& info = registry.at(n);
        out.impacts.push_back(info.impact);
        out.confidences.push_back(info.confidence);
    }
    return out;
}

std::vector<Finding> parse_external_report(std::string_view report_text) {
    json j;
    try {
        j = json::parse(report_text);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Parse, std::string("analyzer report is not JSON: ") + e.what());
    }
    const auto results = j.find("results");
    if (!j.is_object() || results == j.end() || !results->is_object()) {
        throw Error(ErrorCode::Parse, "analyzer report has no 'results' object");
    }
    const auto detectors = results->find("detectors");
    if (detectors == results->end() || !detectors->is_array()) {
        throw Error(ErrorCode::Parse, "analyzer report has no 'results.detectors' array");
    }
    std::vector<Finding> findings;
    findings.reserve(detectors->size());
    for (const auto& entry : *detectors) {
        auto str = [&](const char* key) {
            auto it = entry.find(key);
            if (it == entry.end() || !it->is_string()) {
                throw Error(ErrorCode::Parse, std::string("detector entry lacks string field '") + key + "'");
            }
            return it->get<std::string>();
        };
        Finding f;
        f.detector = str("check");
        if (f.detector.empty()) throw Error(ErrorCode::Parse, "detector entry has an empty 'check'");
        f.impact = severity_from_name(str("impact"));
        f.confidence = severity_from_name(str("confidence"));
        findings.push_back(std::move(f));
    }
    return findings;
}

std::vector<std::string> default_ladder() {
    return {kVersionLadder.begin(), kVersionLadder.end()};
}

AnalysisReport analyze_multi_version(std::string_view source, const std::vector<std::string>& ladder,
                                     const ExternalInvoker& run) {
    AnalysisReport report;
    std::set<std::string, std::less<>> seen;
    bool any = false;
    for (const auto& version : ladder) {
        const auto rewritten = rewrite_pragma(source, version);
        InvocationResult result;
        try {
            result = run(rewritten, version);
        } catch (const Error&) {
            continue;  // an invoker failure counts as this version not compiling
        }
        if (!result.compiled) continue;
        any = true;
        report.compiler_versions_used.push_back(version);
        for (auto& f : result.findings) {
            if (seen.insert(f.detector).second) report.findings.push_back(std::move(f));
        }
    }
    if (!any) return AnalysisReport::null_report();
    return report;
}

namespace {

std::string shell_quote(std::string_view s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'') out += "'\\''";
        else out += c;
    }
    out += '\'';
    return out;
}

std::string substitute(std::string text, std::string_view key, std::string_view value) {
    for (std::size_t p = text.find(key); p != std::string::npos; p = text.find(key, p + value.size())) {
        text.replace(p, key.size(), value);
    }
    return text;
}

class TempFile {
public:
    explicit TempFile(std::string_view contents) {
        static std::atomic<unsigned long> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("contract-triage-" + std::to_string(::getpid()) + "-" + std::to_string(counter++) + ".sol");
        std::ofstream out(path_, std::ios::binary);
        if (!out) throw Error(ErrorCode::Io, "cannot create " + path_.string());
        out << contents;
        if (!out.flush()) throw Error(ErrorCode::Io, "cannot write " + path_.string());
    }
    ~TempFile() {
        std::error_code ec;
        std::filesystem::remove(path_, ec);
    }
    TempFile(const TempFile&) = delete;
    TempFile& operator=(const TempFile&) = delete;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

} // namespace

SubprocessInvoker::SubprocessInvoker(std::string command_template) : template_(std::move(command_template)) {
    if (template_.empty()) throw Error(ErrorCode::InvalidArgument, "analyzer command template is empty");
}

InvocationResult SubprocessInvoker::interpret(int exit_status, std::string_view stdout_text) {
    InvocationResult result;
    try {
        result.findings = parse_external_report(stdout_text);
    } catch (const Error&) {
        return result;  // no usable report: treat as a compile failure
    }
    result.compiled = exit_status == 0 || !result.findings.empty();
    if (!result.compiled) result.findings.clear();
    return result;
}

InvocationResult SubprocessInvoker::operator()(std::string_view source, std::string_view version) const {
    const TempFile file(source);
    auto command = substitute(template_, "{file}", shell_quote(file.path().string()));
    command = substitute(command, "{solc_version}", version);
    command += " 2>/dev/null";

    FILE* pipe = ::popen(command.c_str(), "r");
    if (!pipe) throw Error(ErrorCode::Io, "cannot start analyzer: " + command);
    std::string output;
    char buffer[4096];
    std::size_t n;
    while ((n = std::fread(buffer, 1, sizeof buffer, pipe)) > 0) output.append(buffer, n);
    const int status = ::pclose(pipe);
    const int exit_code = (status != -1 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
    return interpret(exit_code, output);
}

Analyzer Analyzer::builtin() { return Analyzer{}; }

Analyzer Analyzer::external(std::string command_template) {
    return external(ExternalInvoker(SubprocessInvoker(std::move(command_template))));
}

Analyzer Analyzer::external(ExternalInvoker invoker) {
    if (!invoker) throw Error(ErrorCode::InvalidArgument, "external analyzer needs an invoker");
    Analyzer a;
    a.invoker_ = std::move(invoker);
    return a;
}

AnalysisReport Analyzer::analyze(std::string_view source) const {
    if (!invoker_) return analyze_builtin(source);
    return analyze_multi_version(source, ladder_, invoker_);
}

void apply_report(ContractRecord& record, const AnalysisReport& report) {
    if (!report.ok()) {
        record.vulnerabilities.reset();
        record.confidences.reset();
        record.impacts.reset();
        return;
    }
    std::vector<std::string> names;
    std::vector<Severity> confidences, impacts;
    for (const auto& f : report.findings) {
        names.push_back(f.detector);
        confidences.push_back(f.confidence);
        impacts.push_back(f.impact);
    }
    record.vulnerabilities = std::move(names);
    record.confidences = std::move(confidences);
    record.impacts = std::move(impacts);
}

void analyze_corpus(Corpus& records, const Analyzer& analyzer, unsigned jobs, bool only_unanalyzed) {
    std::vector<std::optional<AnalysisReport>> reports(records.size());
    parallel_for(records.size(), jobs, [&](std::size_t i) {
        if (only_unanalyzed && records[i].analyzed()) return;
        reports[i] = analyzer.analyze(records[i].source);
    });
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (reports[i]) apply_report(records[i], *reports[i]);
    }
}

AnalysisReport report_from_record(const ContractRecord& record) {
    if (!record.analyzed()) throw Error(ErrorCode::MissingAnalysis, "record has no analysis");
    validate_record(record);
    AnalysisReport report;
    for (std::size_t i = 0; i < record.vulnerabilities->size(); ++i) {
        report.findings.push_back({(*record.vulnerabilities)[i], (*record.impacts)[i], (*record.confidences)[i]});
    }
    return report;
}

std::string report_to_json(const AnalysisReport& report) {
    nlohmann::ordered_json j;
    j["status"] = report.ok() ? "Ok" : "Null";
    j["compiler_versions_used"] = report.compiler_versions_used;
    auto findings = nlohmann::ordered_json::array();
    for (const auto& f : report.findings) {
        nlohmann::ordered_json fj;
        fj["detector"] = f.detector;
        fj["impact"] = std::string(name(f.impact));
        fj["confidence"] = std::string(name(f.confidence));
        findings.push_back(std::move(fj));
    }
    j["findings"] = std::move(findings);
    return j.dump();
}

} // namespace triage

/*
 * Copyright 2026 The contract-triage Authors.
 * SPDX-License-Identifier: Apache-2.0
 */
#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "contract_triage/triage.h"

namespace {

struct KeyHelp {
    const char* key;
    const char* help;
};

// Value-taking options; each maps to the config key of the same name.
constexpr KeyHelp kValueOptions[] = {
    {"seed", "Seed for generation, sampling, splitting and training"},
    {"out", "Output directory for stage files and reports"},
    {"input", "Input file (corpus .jsonl/.csv, or a .sol file for analyze)"},
    {"jobs", "Worker threads"},
    {"mode", "Analyzer: builtin or external"},
    {"analyzer-command", "External analyzer command template ({file}, {solc_version})"},
    {"llm", "Repairer: mock or endpoint"},
    {"llm-base-url", "Chat-completions base URL"},
    {"llm-model", "Chat model name"},
    {"llm-temperature", "Sampling temperature"},
    {"llm-api-key", "Chat API key (LLM_API_KEY wins)"},
    {"llm-timeout-ms", "Chat request timeout"},
    {"llm-max-retries", "Retries on 429/5xx"},
    {"snippets", "Snippet bank directory (defaults to the built-in bank)"},
    {"generate", "Generate N synthetic contracts"},
    {"ratio", "Malicious fraction for generation and reduction"},
    {"target", "Reduced corpus size (0: largest the ratio allows)"},
    {"etherscan-endpoint", "Block-explorer API endpoint"},
    {"etherscan-api-key", "Block-explorer API key (ETHERSCAN_API_KEY wins)"},
    {"fetch-interval-ms", "Minimum spacing between explorer requests"},
    {"fetch-retries", "Retries on throttling"},
    {"cache-dir", "Source cache directory"},
    {"train-fraction", "Training share of the prepared corpus"},
    {"trees", "Number of trees"},
    {"max-depth", "Tree depth limit, or none"},
    {"min-samples-split", "Smallest node that may split"},
    {"mtry", "Features tried per split, or none for sqrt"},
    {"max-attempts", "Repair attempts per contract"},
};

constexpr KeyHelp kFlagOptions[] = {
    {"fetch", "Run the fetch stage first (pipeline)"},
    {"repair-all", "Repair every analyzed contract with findings, not just flagged ones"},
};

void log_line(const char* line, void*) { std::cerr << line << '\n'; }

int fail(ct_status status) {
    std::cerr << "error: " << ct_status_name(status) << ": " << ct_last_error() << '\n';
    return static_cast<int>(status) == 0 ? 1 : static_cast<int>(status);
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Smart-contract vulnerability triage: analyze, classify and repair"};
    app.set_version_flag("--version", std::string(ct_version()));
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "key = value config file; flags override it")
        ->check(CLI::ExistingFile);

    std::map<std::string, std::string> values;
    for (const auto& o : kValueOptions) {
        app.add_option(std::string("--") + o.key, values[o.key], o.help);
    }
    std::map<std::string, bool> flags;
    for (const auto& f : kFlagOptions) {
        flags[f.key] = false;
        app.add_flag(std::string("--") + f.key, flags[f.key], f.help);
    }

    const std::pair<const char*, const char*> kCommands[] = {
        {"fetch", "Download verified sources for the addresses in --input"},
        {"generate", "Write a synthetic labelled corpus"},
        {"analyze", "Run the analyzer on a corpus, or print the report for one .sol file"},
        {"prepare", "Keep analyzed records, rebalance, and split train/test"},
        {"train", "Train the classifier on the training split"},
        {"classify", "Predict the test split"},
        {"evaluate", "Score predictions against labels"},
        {"repair", "Repair flagged contracts and write the summary report"},
        {"pipeline", "Run every stage in order"},
    };
    for (const auto& [name, help] : kCommands) app.add_subcommand(name, help)->fallthrough();

    CLI11_PARSE(app, argc, argv);

    ct_config* config = nullptr;
    if (auto s = ct_config_new(&config); s != CT_OK) return fail(s);
    struct Guard {
        ct_config* c;
        ~Guard() { ct_config_free(c); }
    } guard{config};
    ct_config_set_logger(config, &log_line, nullptr);

    if (!config_path.empty()) {
        if (auto s = ct_config_load_file(config, config_path.c_str()); s != CT_OK) return fail(s);
    }
    for (const auto& o : kValueOptions) {
        if (app.count(std::string("--") + o.key) > 0) {
            if (auto s = ct_config_set(config, o.key, values[o.key].c_str()); s != CT_OK) return fail(s);
        }
    }
    for (const auto& f : kFlagOptions) {
        if (flags[f.key]) {
            if (auto s = ct_config_set(config, f.key, "true"); s != CT_OK) return fail(s);
        }
    }

    const std::string command = app.get_subcommands().front()->get_name();
    if (command == "analyze" && ends_with(values["input"], ".sol")) {
        std::ifstream in(values["input"], std::ios::binary);
        if (!in) {
            std::cerr << "error: IoError: cannot read " << values["input"] << '\n';
            return CT_IO;
        }
        std::stringstream buffer;
        buffer << in.rdbuf();
        char* json = nullptr;
        if (auto s = ct_config_analyze_source(config, buffer.str().c_str(), &json); s != CT_OK) return fail(s);
        std::cout << json << '\n';
        ct_string_free(json);
        return 0;
    }

    const ct_status status = command == "pipeline" ? ct_run_pipeline(config) : ct_run_stage(config, command.c_str());
    return status == CT_OK ? 0 : fail(status);
}

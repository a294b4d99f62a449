/*
 * Copyright 2026 The contract-triage Authors.
 * SPDX-License-Identifier: Apache-2.0
 */
#include "triage/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "csv.hpp"
#include "text.hpp"
#include "triage/parallel.hpp"
#include "triage/report.hpp"

namespace triage {

namespace {

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view expected) {
    throw Error(ErrorCode::InvalidArgument,
                "bad value '" + std::string(value) + "' for '" + std::string(key) + "': expected " +
                    std::string(expected));
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
    const auto v = text::trim(value);
    T out{};
    const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || end != v.data() + v.size() || v.empty()) bad_value(key, value, "a number");
    return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
    std::string v(text::trim(value));
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    bad_value(key, value, "true or false");
}

std::optional<std::uint32_t> parse_optional(std::string_view key, std::string_view value) {
    const auto v = text::trim(value);
    if (v == "none" || v == "-" || v.empty()) return std::nullopt;
    return parse_number<std::uint32_t>(key, v);
}

double parse_fraction(std::string_view key, std::string_view value) {
    const auto f = parse_number<double>(key, value);
    if (!(f >= 0.0 && f <= 1.0)) bad_value(key, value, "a fraction in [0, 1]");
    return f;
}

using Setter = void (*)(PipelineConfig&, std::string_view, std::string_view);

const std::map<std::string, Setter, std::less<>>& setters() {
    static const std::map<std::string, Setter, std::less<>> table = {
        {"seed", [](PipelineConfig& c, std::string_view k, std::string_view v) {
             c.seed = parse_number<std::uint64_t>(k, v);
         }},
        {"out", [](PipelineConfig& c, std::string_view, std::string_view v) { c.out_dir = std::string(v); }},
        {"input", [](PipelineConfig& c, std::string_view, std::string_view v) {
             if (v.empty()) c.input.reset(); else c.input = std::string(v);
         }},
        {"jobs", [](PipelineConfig& c, std::string_view k, std::string_view v) {
             c.jobs = std::max(1u, parse_number<unsigned>(k, v));
         }},
        {"mode", [](PipelineConfig& c, std::string_view k, std::string_view v) {
             if (v == "builtin") c.analyzer_mode = AnalyzerMode::Builtin;
             else if (v == "external") c.analyzer_mode = AnalyzerMode::External;
             else bad_value(k, v, "builtin or external");
         }},
        {"analyzer-command", [](PipelineConfig& c, std::string_view, std::string_view v) {
             c.analyzer_command = std::string(v);
         }},
        {"llm", [](PipelineConfig& c, std::string_view k, std::string_view v) {
             if (v == "mock") c.llm_mode = LlmMode::Mock;
             else if (v == "endpoint") c.llm_mode = LlmMode::Endpoint;
             else bad_value(k, v, "mock or endpoint");
         }},
        {"llm-base-url", [](PipelineConfig& c, std::string_view, std::string_view v) { c.chat.base_url = std::string(v); }},
        {"llm-model", [](PipelineConfig& c, std::string_view, std::string_view v) { c.chat.model = std::string(v); }},
        {"llm-temperature", [](PipelineConfig& c, std::string_view k, std::string_view v) {
             c.chat.temperature = parse_number<double>(k, v);
         }},
        {"llm-api-key", [](PipelineConfig& c, std::string_view, std::string_view v) { c.chat.api_key = std::string(v); }},
        {"llm-timeout-ms", [](PipelineConfig& c, std::string_view k, std::string_view v) {
             c.chat.timeout = std::chrono::milliseconds(parse_number<std::uint32_t>(k, v));
         }},
        {"llm-max-retries", [](PipelineConfig& c, std::string_view k, std::string_view v) {
             c.chat.max_retries = parse_number<std::uint32_t>(k, v);
         }},
        {"snippets", [](PipelineConfig& c, std::string_view, std::string_view v) {
             if (v.empty()) c.snippets_dir.reset(); else c.snippets_dir = std::string(v);
         }},
        {"generate", [](PipelineConfig& c, std::string_view k, std::string_view v) {
             c.generate_count = parse_number<std::size_t>(k, v);
         }},
        {"ratio", [](PipelineConfig& c, std::string_view k, std::string_view v) { c.malicious_ratio = parse_fraction(k, v); }},
        {"target", [](PipelineConfig& c, std::string_view k, std::string_view v) {
             c.target_size = parse_number<std::size_t>(k, v);
         }},
        {"fetch", [](PipelineConfig& c, std::string_view k, std::string_view v) { c.fetch_enabled = parse_bool(k, v); }},
        {"etherscan-endpoint", [](PipelineConfig& c, std::string_view, std::string_view v) {
             c.fetch.endpoint = std::string(v);
         }},
        {"etherscan-api-key", [](PipelineConfig& c, std::string_view, std::string_view v) {
             c.fetch.api_key = std::string(v);
         }},
        {"fetch-interval-ms", [](PipelineConfig& c, std::string_view k, std::string_view v) {
             c.fetch.min_interval = std::chrono::milliseconds(parse_number<std::uint32_t>(k, v));
         }},
        {"fetch-retries", [](PipelineConfig& c, std::string_view k, std::string_view v) {
             c.fetch.max_retries = parse_number<std::uint32_t>(k, v);
         }},
        {"cache-dir", [](PipelineConfig& c, std::string_view, std::string_view v) { c.fetch.cache_dir = std::string(v); }},
        {"train-fraction", [](PipelineConfig& c, std::string_view k, std::string_view v) {
             c.train_fraction = parse_fraction(k, v);
         }},
        {"trees", [](PipelineConfig& c, std::string_view k, std::string_view v) {
             c.forest.n_trees = parse_number<std::uint32_t>(k, v);
             if (c.forest.n_trees == 0) bad_value(k, v, "at least one tree");
         }},
        {"max-depth", [](PipelineConfig& c, std::string_view k, std::string_view v) { c.forest.max_depth = parse_optional(k, v); }},
        {"min-samples-split", [](PipelineConfig& c, std::string_view k, std::string_view v) {
             c.forest.min_samples_split = parse_number<std::uint32_t>(k, v);
         }},
        {"mtry", [](PipelineConfig& c, std::string_view k, std::string_view v) {
             c.forest.mtry = parse_optional(k, v);
             if (c.forest.mtry && *c.forest.mtry == 0) bad_value(k, v, "a positive count or 'none'");
         }},
        {"max-attempts", [](PipelineConfig& c, std::string_view k, std::string_view v) {
             c.max_attempts = parse_number<std::uint32_t>(k, v);
         }},
        {"repair-all", [](PipelineConfig& c, std::string_view k, std::string_view v) { c.repair_all = parse_bool(k, v); }},
    };
    return table;
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_text(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    out << content;
    if (!out.flush()) throw Error(ErrorCode::Io, "cannot write " + path.string());
}

struct Prediction {
    std::size_t index;
    bool label;
    bool predicted;
};

std::vector<Prediction> read_predictions(const std::filesystem::path& path) {
    const auto rows = csv::parse(read_text(path));
    std::vector<Prediction> out;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& f = rows[r].fields;
        if (f.size() == 1 && f[0].empty()) continue;
        if (f.size() < 4) throw Error(ErrorCode::Parse, path.string() + ": short row", static_cast<long>(rows[r].line));
        out.push_back({parse_number<std::size_t>("index", f[0]), f[2] == "true", f[3] == "true"});
    }
    return out;
}

Metrics read_metrics(const std::filesystem::path& path) {
    try {
        const auto j = nlohmann::json::parse(read_text(path));
        return metrics_from_counts(j.at("tp").get<std::uint64_t>(), j.at("fp").get<std::uint64_t>(),
                                   j.at("tn").get<std::uint64_t>(), j.at("fn").get<std::uint64_t>());
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Parse, path.string() + ": " + e.what());
    }
}

std::string fixed(double v, int digits = 4) {
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(digits);
    s << v;
    return s.str();
}

} // namespace

void PipelineConfig::set(std::string_view key, std::string_view value) {
    const auto& table = setters();
    const auto it = table.find(text::trim(key));
    if (it == table.end()) throw Error(ErrorCode::InvalidArgument, "unknown config key '" + std::string(key) + "'");
    it->second(*this, it->first, text::trim(value));
}

void PipelineConfig::load_file(const std::filesystem::path& path) {
    std::istringstream in(read_text(path));
    std::string line;
    for (long n = 1; std::getline(in, line); ++n) {
        const auto t = text::trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string_view::npos) {
            throw Error(ErrorCode::Parse, path.string() + ":" + std::to_string(n) + ": expected key = value", n);
        }
        try {
            set(t.substr(0, eq), t.substr(eq + 1));
        } catch (const Error& e) {
            throw Error(ErrorCode::Parse, path.string() + ":" + std::to_string(n) + ": " + e.what(), n);
        }
    }
}

std::vector<std::string> PipelineConfig::keys() {
    std::vector<std::string> out;
    for (const auto& [k, _] : setters()) out.push_back(k);
    return out;
}

Pipeline::Pipeline(PipelineConfig config, LogSink log, TransportFactory transports)
    : config_(std::move(config)), log_(std::move(log)), transports_(std::move(transports)) {
    if (config_.snippets_dir) custom_bank_ = std::make_unique<SnippetBank>(SnippetBank::load_directory(*config_.snippets_dir));
    config_.forest.jobs = config_.jobs;
    config_.forest.seed = config_.seed;
}

void Pipeline::log(const std::string& line) const {
    if (log_) log_(line);
}

const SnippetBank& Pipeline::bank() const { return custom_bank_ ? *custom_bank_ : SnippetBank::builtin(); }

std::filesystem::path Pipeline::file(std::string_view name) const { return config_.out_dir / std::string(name); }

std::filesystem::path Pipeline::input_or(std::initializer_list<std::string_view> candidates) {
    if (config_.input && !input_consumed_) {
        input_consumed_ = true;
        return *config_.input;
    }
    for (auto c : candidates) {
        if (std::filesystem::exists(file(c))) return file(c);
    }
    std::string names;
    for (auto c : candidates) names += (names.empty() ? "" : " or ") + file(c).string();
    throw Error(ErrorCode::Io, "missing input: " + names + " (run the earlier stage or pass --input)");
}

Analyzer Pipeline::make_analyzer() const {
    return config_.analyzer_mode == AnalyzerMode::Builtin ? Analyzer::builtin()
                                                          : Analyzer::external(config_.analyzer_command);
}

AnalysisReport Pipeline::analyze_source(std::string_view source) const { return make_analyzer().analyze(source); }

void Pipeline::run_stage(std::string_view stage) {
    std::error_code ec;
    std::filesystem::create_directories(config_.out_dir, ec);
    if (ec) throw Error(ErrorCode::Io, std::string(stage) + ": cannot create " + config_.out_dir.string());
    try {
        if (stage == "fetch") stage_fetch();
        else if (stage == "generate") stage_generate();
        else if (stage == "analyze") stage_analyze();
        else if (stage == "prepare") stage_prepare();
        else if (stage == "train") stage_train();
        else if (stage == "classify") stage_classify();
        else if (stage == "evaluate") stage_evaluate();
        else if (stage == "repair") stage_repair();
        else throw Error(ErrorCode::InvalidArgument, "unknown stage");
    } catch (const Error& e) {
        throw Error(e.code(), std::string(stage) + ": " + e.what(), e.detail());
    }
}

void Pipeline::run_all() {
    if (config_.fetch_enabled) run_stage("fetch");
    if (config_.generate_count > 0) run_stage("generate");
    for (auto stage : {"analyze", "prepare", "train", "classify", "evaluate", "repair"}) run_stage(stage);
}

void Pipeline::stage_fetch() {
    if (!config_.input) throw Error(ErrorCode::InvalidArgument, "fetch needs --input with contract addresses");
    auto records = load_any(input_or({}));
    std::vector<std::string> addresses;
    std::vector<std::size_t> slots;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (records[i].address && text::trim(records[i].source).empty()) {
            addresses.push_back(*records[i].address);
            slots.push_back(i);
        }
    }
    std::vector<bool> keep(records.size(), true);
    if (!addresses.empty()) {
        auto transport = transports_(std::chrono::milliseconds(30000));
        SteadyClock clock;
        SourceFetcher fetcher(config_.fetch, *transport, clock);
        const auto outcomes = fetcher.fetch_batch(addresses);
        for (std::size_t k = 0; k < outcomes.size(); ++k) {
            if (outcomes[k].ok()) {
                records[slots[k]].source = outcomes[k].source();
            } else {
                keep[slots[k]] = false;
                log("fetch: " + outcomes[k].address + ": " + outcomes[k].failure().message);
            }
        }
        log("fetch: " + std::to_string(fetcher.network_requests()) + " requests, " +
            std::to_string(fetcher.cache_hits()) + " cache hits");
    }
    Corpus kept;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (keep[i]) kept.push_back(std::move(records[i]));
    }
    save_corpus(kept, file(stage_files::kFetched));
    upstream_ = file(stage_files::kFetched);
    log("fetch: " + std::to_string(kept.size()) + " of " + std::to_string(records.size()) + " records -> " +
        upstream_->string());
}

void Pipeline::stage_generate() {
    if (config_.generate_count == 0) throw Error(ErrorCode::InvalidArgument, "nothing to generate (--generate N)");
    const auto corpus = generate_corpus(config_.generate_count, config_.malicious_ratio, config_.seed, bank());
    save_corpus(corpus, file(stage_files::kGenerated));
    upstream_ = file(stage_files::kGenerated);
    log("generate: " + std::to_string(corpus.size()) + " records (" + std::to_string(count_malicious(corpus)) +
        " malicious) -> " + upstream_->string());
}

void Pipeline::stage_analyze() {
    const auto in = upstream_ ? *upstream_ : input_or({stage_files::kGenerated, stage_files::kFetched});
    auto records = load_any(in);
    analyze_corpus(records, make_analyzer(), config_.jobs);
    const auto flagged = std::count_if(records.begin(), records.end(),
                                       [](const auto& r) { return r.analyzed() && !r.vulnerabilities->empty(); });
    const auto null_reports = std::count_if(records.begin(), records.end(), [](const auto& r) { return !r.analyzed(); });
    save_corpus(records, file(stage_files::kAnalyzed));
    log("analyze: " + std::to_string(records.size()) + " records, " + std::to_string(flagged) + " with findings, " +
        std::to_string(null_reports) + " did not compile -> " + file(stage_files::kAnalyzed).string());
}

void Pipeline::stage_prepare() {
    const auto analyzed = filter_analyzed(load_any(input_or({stage_files::kAnalyzed})));
    const auto target =
        config_.target_size ? config_.target_size : max_feasible_target(analyzed, config_.malicious_ratio);
    const auto prepared = stratified_reduce(analyzed, target, config_.malicious_ratio, config_.seed);
    const auto split = train_test_split(prepared, config_.train_fraction, config_.seed);
    save_corpus(prepared, file(stage_files::kPrepared));
    save_corpus(split.train, file(stage_files::kTrain));
    save_corpus(split.test, file(stage_files::kTest));
    log("prepare: " + std::to_string(prepared.size()) + " records (" + std::to_string(count_malicious(prepared)) +
        " malicious), " + std::to_string(split.train.size()) + " train / " + std::to_string(split.test.size()) +
        " test");
}

void Pipeline::stage_train() {
    const auto train = load_any(input_or({stage_files::kTrain}));
    TriageModel model;
    model.vocabulary = build_vocabulary(train);
    std::vector<FeatureVector> vectors;
    vectors.reserve(train.size());
    for (const auto& r : train) vectors.push_back(vectorize(r, model.vocabulary));
    model.forest = train_forest(vectors, config_.forest);
    model.save(file(stage_files::kModel));
    model.vocabulary.save(file(stage_files::kVocabulary));
    log("train: " + std::to_string(model.forest.trees().size()) + " trees over " +
        std::to_string(vectors.size()) + " records, " + std::to_string(model.forest.features()) + " features -> " +
        file(stage_files::kModel).string());
}

void Pipeline::stage_classify() {
    const auto test = load_any(input_or({stage_files::kTest}));
    const auto model = TriageModel::load(file(stage_files::kModel));
    std::vector<FeatureVector> vectors;
    vectors.reserve(test.size());
    for (const auto& r : test) vectors.push_back(vectorize(r, model.vocabulary));
    std::vector<std::size_t> votes(vectors.size());
    parallel_for(vectors.size(), config_.jobs, [&](std::size_t i) { votes[i] = model.forest.votes(vectors[i]); });
    const auto trees = model.forest.trees().size();
    std::string out = "index,contract_address,label,prediction,votes,trees\n";
    std::size_t flagged = 0;
    for (std::size_t i = 0; i < test.size(); ++i) {
        const bool predicted = 2 * votes[i] >= trees;
        flagged += predicted;
        out += std::to_string(i) + ',' + csv::escape(test[i].address.value_or("")) + ',' +
               (test[i].malicious ? "true" : "false") + ',' + (predicted ? "true" : "false") + ',' +
               std::to_string(votes[i]) + ',' + std::to_string(trees) + '\n';
    }
    write_text(file(stage_files::kPredictions), out);
    log("classify: " + std::to_string(flagged) + " of " + std::to_string(test.size()) + " flagged malicious -> " +
        file(stage_files::kPredictions).string());
}

void Pipeline::stage_evaluate() {
    const auto predictions = read_predictions(file(stage_files::kPredictions));
    std::vector<bool> predicted, truth;
    for (const auto& p : predictions) {
        predicted.push_back(p.predicted);
        truth.push_back(p.label);
    }
    const auto metrics = evaluate_metrics(predicted, truth);
    write_text(file(stage_files::kMetrics), metrics_to_json(metrics));
    log("evaluate: accuracy " + fixed(metrics.accuracy) + ", F1 " + fixed(metrics.f1) + ", FPR " +
        fixed(metrics.false_positive_rate) + " over " + std::to_string(metrics.total()) + " records");
}

void Pipeline::stage_repair() {
    Corpus targets;
    if (config_.repair_all) {
        for (auto& r : load_any(input_or({stage_files::kAnalyzed}))) {
            if (r.analyzed() && !r.vulnerabilities->empty()) targets.push_back(std::move(r));
        }
    } else {
        const auto test = load_any(input_or({stage_files::kTest}));
        for (const auto& p : read_predictions(file(stage_files::kPredictions))) {
            if (p.index >= test.size()) {
                throw Error(ErrorCode::DimensionMismatch, "predictions do not match the test set");
            }
            const auto& r = test[p.index];
            if (p.predicted && r.analyzed() && !r.vulnerabilities->empty()) targets.push_back(r);
        }
    }

    const auto analyzer = make_analyzer();
    const AnalyzeFn analyze = [&analyzer](std::string_view source) { return analyzer.analyze(source); };
    std::vector<RepairSession> sessions(targets.size());
    parallel_for(targets.size(), config_.jobs, [&](std::size_t i) {
        LlmFn llm;
        std::unique_ptr<HttpTransport> transport;
        SteadyClock clock;
        if (config_.llm_mode == LlmMode::Mock) {
            llm = [this](std::string_view prompt) { return mock_repairer(prompt, bank()); };
        } else {
            transport = transports_(config_.chat.timeout);
            llm = [&](std::string_view prompt) { return chat_complete(config_.chat, prompt, *transport, clock); };
        }
        sessions[i] = repair_loop(targets[i], analyze, llm, config_.max_attempts);
    });

    std::string lines;
    for (const auto& s : sessions) lines += session_to_json_line(s) + '\n';
    write_text(file(stage_files::kSessions), lines);

    std::optional<Metrics> metrics;
    if (std::filesystem::exists(file(stage_files::kMetrics))) metrics = read_metrics(file(stage_files::kMetrics));
    const auto paths = ReportPaths::in(config_.out_dir);
    emit_summary(sessions, metrics, paths);

    std::vector<AnalysisReport> before, after;
    for (const auto& s : sessions) {
        before.push_back(s.report_before);
        after.push_back(s.final_report());
    }
    const auto reduction = reduction_percentage(impact_histogram(before), impact_histogram(after));
    log("repair: " + std::to_string(sessions.size()) + " sessions, reduction " +
        (reduction ? fixed(*reduction * 100.0, 1) + "%" : std::string("n/a")) + " -> " +
        paths.summary_json.string());
}

} // namespace triage

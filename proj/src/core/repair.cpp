/*
 * Copyright 2026 The contract-triage Authors.
 * SPDX-License-Identifier: Apache-2.0
 */
#include "triage/repair.hpp"

#include <algorithm>
#include <thread>

#include <json.hpp>

#include "text.hpp"
#include "triage/error.hpp"

namespace triage {

using ordered_json = nlohmann::ordered_json;

std::string build_prompt(std::string_view source, const std::vector<std::string>& names) {
    if (names.empty()) throw Error(ErrorCode::EmptyVulnList, "no vulnerabilities to repair");
    std::string joined;
    for (const auto& n : names) {
        if (text::trim(n).empty()) throw Error(ErrorCode::EmptyVulnList, "empty vulnerability name");
        if (!joined.empty()) joined += ", ";
        joined += n;
    }
    std::string prompt;
    prompt.reserve(kPromptSystemPart.size() + kPromptInstructionPart.size() + source.size() + joined.size() + 64);
    prompt += kPromptSystemPart;
    prompt += ' ';
    prompt += kPromptInstructionPart;
    prompt += ' ';
    prompt += kPromptSourceLead;
    prompt += source;
    prompt += kPromptVulnLead;
    prompt += joined;
    prompt += '.';
    return prompt;
}

ChatMessages split_prompt(std::string_view prompt) {
    if (prompt.starts_with(kPromptSystemPart)) {
        auto rest = prompt.substr(kPromptSystemPart.size());
        if (rest.starts_with(' ')) rest.remove_prefix(1);
        return {std::string(kPromptSystemPart), std::string(rest)};
    }
    return {std::string(), std::string(prompt)};
}

std::optional<std::string> source_from_prompt(std::string_view prompt) {
    const auto lead = prompt.find(kPromptSourceLead);
    if (lead == std::string_view::npos) return std::nullopt;
    const auto begin = lead + kPromptSourceLead.size();
    const auto end = prompt.rfind(kPromptVulnLead);
    if (end == std::string_view::npos || end < begin) return std::nullopt;
    return std::string(prompt.substr(begin, end - begin));
}

std::optional<std::string> extract_contract(std::string_view response) {
    std::string_view body;
    if (auto fence = response.find("```"); fence != std::string_view::npos) {
        auto start = response.find('\n', fence);
        if (start == std::string_view::npos) return std::nullopt;
        ++start;
        const auto close = response.find("```", start);
        body = response.substr(start, close == std::string_view::npos ? std::string_view::npos : close - start);
    } else {
        constexpr std::string_view kStart = "New Smart Contract:";
        constexpr std::string_view kEnd = "Vulnerabilities unable to repair:";
        const auto s = response.find(kStart);
        if (s == std::string_view::npos) return std::nullopt;
        const auto from = s + kStart.size();
        const auto e = response.find(kEnd, from);
        body = response.substr(from, e == std::string_view::npos ? std::string_view::npos : e - from);
    }
    const auto trimmed = text::trim(body);
    if (trimmed.empty()) return std::nullopt;
    return std::string(trimmed);
}

bool looks_like_refusal(std::string_view response) {
    if (response.find("```") != std::string_view::npos) return false;
    const auto t = text::trim(response);
    static constexpr std::string_view kOpeners[] = {
        "As an AI", "I can't", "I cannot", "I can\xE2\x80\x99t", "I'm sorry", "I am sorry", "I\xE2\x80\x99m sorry",
        "I'm unable", "I am unable", "Sorry,"};
    return std::any_of(std::begin(kOpeners), std::end(kOpeners),
                       [&](std::string_view o) { return text::starts_with_icase(t, o); });
}

std::string ChatConfig::effective_api_key() const {
    auto env = env_or_empty("LLM_API_KEY");
    return env.empty() ? api_key : env;
}

std::string chat_request_body(const ChatConfig& config, std::string_view prompt) {
    const auto parts = split_prompt(prompt);
    ordered_json j;
    j["model"] = config.model;
    j["temperature"] = config.temperature;
    auto messages = ordered_json::array();
    if (!parts.system.empty()) messages.push_back({{"role", "system"}, {"content", parts.system}});
    messages.push_back({{"role", "user"}, {"content", parts.user}});
    j["messages"] = std::move(messages);
    return j.dump();
}

std::string parse_chat_response(std::string_view body) {
    try {
        const auto j = nlohmann::json::parse(body);
        const auto& content = j.at("choices").at(0).at("message").at("content");
        if (!content.is_string()) throw Error(ErrorCode::Parse, "chat response content is not a string");
        return content.get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Parse, std::string("malformed chat response: ") + e.what());
    }
}

namespace {

std::string completions_url(const std::string& base) {
    std::string url = base;
    while (!url.empty() && url.back() == '/') url.pop_back();
    if (url.ends_with("/chat/completions")) return url;
    if (url.ends_with("/v1")) return url + "/chat/completions";
    return url + "/v1/chat/completions";
}

} // namespace

std::string chat_complete(const ChatConfig& config, std::string_view prompt, HttpTransport& transport,
                          Clock& clock) {
    const auto url = completions_url(config.base_url);
    const auto body = chat_request_body(config, prompt);
    HttpHeaders headers{{"Authorization", "Bearer " + config.effective_api_key()}};
    for (std::uint32_t attempt = 0;; ++attempt) {
        const auto response = transport.post(url, headers, body, "application/json");
        if (response.status == 200) {
            auto content = parse_chat_response(response.body);
            if (looks_like_refusal(content)) {
                throw Error(ErrorCode::Refusal, "Refusal: " + std::string(text::trim(content).substr(0, 120)));
            }
            return content;
        }
        const bool retryable = response.status == 429 || response.status >= 500;
        if (!retryable || attempt >= config.max_retries) {
            throw Error(ErrorCode::Http, "HttpError(" + std::to_string(response.status) + ")", response.status);
        }
        clock.sleep_for(config.retry_backoff * (1LL << std::min<std::uint32_t>(attempt, 10)));
    }
}

std::string mock_repairer(std::string_view prompt, const SnippetBank& bank) {
    const auto source = source_from_prompt(prompt);
    if (!source) return "I'm sorry, I could not find a contract in the request.";
    std::string names;
    if (auto at = prompt.rfind(kPromptVulnLead); at != std::string_view::npos) {
        auto tail = prompt.substr(at + kPromptVulnLead.size());
        if (tail.ends_with('.')) tail.remove_suffix(1);
        names = std::string(tail);
    }
    std::string out = "Vulnerabilities: " + names + "\nNew Smart Contract:\n```solidity\n";
    out += bank.repair(*source);
    out += "\n```\nVulnerabilities unable to repair: none";
    return out;
}

SeverityKey severity_key(const AnalysisReport& report) {
    SeverityKey key;
    for (const auto& f : report.findings) ++key.counts[kSeverityLevels - 1 - code(f.impact)];
    return key;
}

const AnalysisReport& RepairSession::final_report() const { return best_report ? *best_report : report_before; }

std::string_view to_string(RepairSession::Outcome outcome) noexcept {
    switch (outcome) {
    case RepairSession::Outcome::Clean: return "clean";
    case RepairSession::Outcome::Improved: return "improved";
    case RepairSession::Outcome::Unchanged: return "unchanged";
    case RepairSession::Outcome::Failed: return "failed";
    }
    return "failed";
}

namespace {

std::vector<std::string> unique_names(const AnalysisReport& report) {
    std::vector<std::string> names;
    for (const auto& f : report.findings) {
        if (std::find(names.begin(), names.end(), f.detector) == names.end()) names.push_back(f.detector);
    }
    return names;
}

} // namespace

RepairSession repair_loop(const ContractRecord& record, const AnalyzeFn& analyze, const LlmFn& llm,
                          std::uint32_t max_attempts) {
    if (!record.analyzed() || record.vulnerabilities->empty()) {
        throw Error(ErrorCode::InvalidArgument, "record has no findings to repair");
    }
    RepairSession session;
    session.original = record;
    session.report_before = report_from_record(record);

    std::string working_source = record.source;
    AnalysisReport working_report = session.report_before;
    bool improved = false;
    bool any_valid = false;

    for (std::uint32_t n = 1; n <= max_attempts; ++n) {
        RepairAttempt attempt;
        attempt.attempt_no = n;
        attempt.prompt_text = build_prompt(working_source, unique_names(working_report));
        try {
            attempt.response_text = llm(attempt.prompt_text);
            if (looks_like_refusal(attempt.response_text)) throw Error(ErrorCode::Refusal, "Refusal");
            attempt.extracted_source = extract_contract(attempt.response_text);
            if (!attempt.extracted_source) throw Error(ErrorCode::Parse, "no contract in response");
            attempt.report_after = analyze(*attempt.extracted_source);
            if (!attempt.report_after->ok()) throw Error(ErrorCode::Parse, "candidate did not compile");
        } catch (const Error& e) {
            attempt.error = e.what();
            session.attempts.push_back(std::move(attempt));
            continue;
        }
        any_valid = true;
        const auto& report = *attempt.report_after;
        if (severity_key(report) < severity_key(working_report)) {
            working_source = *attempt.extracted_source;
            working_report = report;
            improved = true;
        }
        session.attempts.push_back(std::move(attempt));
        if (improved && working_report.findings.empty()) break;
    }

    if (improved) {
        session.outcome = working_report.findings.empty() ? RepairSession::Outcome::Clean
                                                          : RepairSession::Outcome::Improved;
        session.best_source = std::move(working_source);
        session.best_report = std::move(working_report);
    } else if (any_valid) {
        session.outcome = RepairSession::Outcome::Unchanged;
        session.best_source = record.source;
        session.best_report = session.report_before;
    } else {
        session.outcome = RepairSession::Outcome::Failed;
    }
    return session;
}

std::string session_to_json_line(const RepairSession& session) {
    ordered_json j;
    j["contract_address"] = session.original.address ? ordered_json(*session.original.address) : ordered_json();
    j["malicious"] = session.original.malicious;
    j["outcome"] = std::string(to_string(session.outcome));
    j["report_before"] = ordered_json::parse(report_to_json(session.report_before));
    j["best_report"] = session.best_report ? ordered_json::parse(report_to_json(*session.best_report)) : ordered_json();
    auto attempts = ordered_json::array();
    for (const auto& a : session.attempts) {
        ordered_json aj;
        aj["attempt_no"] = a.attempt_no;
        aj["prompt_text"] = a.prompt_text;
        aj["response_text"] = a.response_text;
        aj["extracted_source"] = a.extracted_source ? ordered_json(*a.extracted_source) : ordered_json();
        aj["report_after"] = a.report_after ? ordered_json::parse(report_to_json(*a.report_after)) : ordered_json();
        aj["error"] = a.error ? ordered_json(*a.error) : ordered_json();
        attempts.push_back(std::move(aj));
    }
    j["attempts"] = std::move(attempts);
    j["best_source"] = session.best_source ? ordered_json(*session.best_source) : ordered_json();
    return j.dump();
}

} // namespace triage

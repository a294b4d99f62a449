/*
 * Copyright 2026 The contract-triage Authors.
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <array>
#include <chrono>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "triage/analyzer.hpp"
#include "triage/corpus.hpp"
#include "triage/gen.hpp"
#include "triage/net.hpp"

namespace triage {

/// The repair instruction, sentence for sentence. The first two sentences go
/// out as the system message; everything after is the user message.
inline constexpr std::string_view kPromptSystemPart =
    "You are a helpful assistant who will help repair vulnerabilities in smart contracts "
    "written in Solidity. You are to explain the vulnerabilities and output a new smart "
    "contract with all vulnerabilities repaired, with an explanation of what you did.";
inline constexpr std::string_view kPromptInstructionPart =
    "If you are unable to repair a vulnerability, please explain why. Use the following "
    "format for your outputs: Vulnerabilities: ... New Smart Contract: ... Vulnerabilities "
    "unable to repair: ...";
inline constexpr std::string_view kPromptSourceLead = "The smart contract you will repair is ";
inline constexpr std::string_view kPromptVulnLead = " The vulnerabilities are ";

/// Fills the template with the source and comma-separated detector names.
/// Severity levels are never included. Throws Error(EmptyVulnList).
std::string build_prompt(std::string_view source, const std::vector<std::string>& names);

struct ChatMessages {
    std::string system;
    std::string user;
};

/// Splits a built prompt into the system and user roles.
ChatMessages split_prompt(std::string_view prompt);

/// Recovers the embedded source from a built prompt; nullopt if the prompt
/// does not follow the template.
std::optional<std::string> source_from_prompt(std::string_view prompt);

/// First fenced code block; otherwise the text between "New Smart Contract:"
/// and "Vulnerabilities unable to repair:" (or the end). Trimmed; nullopt
/// when empty or absent.
std::optional<std::string> extract_contract(std::string_view response);

/// Leading "As an AI" / "I can't assist" style text with no code fence.
bool looks_like_refusal(std::string_view response);

struct ChatConfig {
    std::string base_url = "https://api.openai.com";
    std::string model = "gpt-3.5-turbo";
    double temperature = 0.0;
    std::string api_key;
    std::chrono::milliseconds timeout{60000};
    std::uint32_t max_retries = 3;
    std::chrono::milliseconds retry_backoff{1000};

    /// LLM_API_KEY wins over `api_key` when set.
    std::string effective_api_key() const;
};

std::string chat_request_body(const ChatConfig& config, std::string_view prompt);

/// Reads choices[0].message.content. Throws Error(Parse).
std::string parse_chat_response(std::string_view body);

/// One chat completion. Retries 429 and 5xx up to max_retries, then throws
/// Error(Http, status). Throws Error(Refusal) / Error(Timeout).
std::string chat_complete(const ChatConfig& config, std::string_view prompt,
                          HttpTransport& transport, Clock& clock);

/// Deterministic stand-in for a model: swaps every known vulnerable snippet
/// in the embedded source for its repaired pair and answers in the prompt's
/// output format.
std::string mock_repairer(std::string_view prompt, const SnippetBank& bank = SnippetBank::builtin());

/// Finding counts ordered HIGH, MEDIUM, LOW, INFORMATIONAL, OPTIMIZATION;
/// compared lexicographically, smaller is better.
struct SeverityKey {
    std::array<std::uint32_t, 5> counts{};
    auto operator<=>(const SeverityKey&) const = default;
};

SeverityKey severity_key(const AnalysisReport& report);

struct RepairAttempt {
    std::uint32_t attempt_no = 0;
    std::string prompt_text;
    std::string response_text;
    std::optional<std::string> extracted_source;
    std::optional<AnalysisReport> report_after;
    std::optional<std::string> error;
};

struct RepairSession {
    enum class Outcome { Clean, Improved, Unchanged, Failed };

    ContractRecord original;
    AnalysisReport report_before;
    std::vector<RepairAttempt> attempts;
    Outcome outcome = Outcome::Failed;
    std::optional<std::string> best_source;
    std::optional<AnalysisReport> best_report;

    /// What a re-analysis would report after this session: best_report, or
    /// report_before when nothing usable came back.
    const AnalysisReport& final_report() const;
};

std::string_view to_string(RepairSession::Outcome outcome) noexcept;

using AnalyzeFn = std::function<AnalysisReport(std::string_view source)>;
using LlmFn = std::function<std::string(std::string_view prompt)>;

inline constexpr std::uint32_t kDefaultMaxAttempts = 5;

/// Prompt, extract, re-analyze up to `max_attempts` times, always working from
/// the best source so far and stopping at the first clean candidate.
/// A candidate only counts if it analyzes (status Ok). Throws
/// Error(InvalidArgument) if the record has no findings.
RepairSession repair_loop(const ContractRecord& record, const AnalyzeFn& analyze, const LlmFn& llm,
                          std::uint32_t max_attempts = kDefaultMaxAttempts);

/// One JSON object per session for audit logs.
std::string session_to_json_line(const RepairSession& session);

} // namespace triage

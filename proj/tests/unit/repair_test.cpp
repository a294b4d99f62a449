/*
 * Copyright 2026 The contract-triage Authors.
 * SPDX-License-Identifier: Apache-2.0
 */
#include <gtest/gtest.h>

#include <map>
#include <json.hpp>

#include "fakes.hpp"
#include "triage/error.hpp"
#include "triage/repair.hpp"

using namespace triage;
using json = nlohmann::json;

namespace {

AnalysisReport report_of(std::initializer_list<std::pair<const char*, Severity>> findings) {
    AnalysisReport r;
    for (const auto& [name, impact] : findings) r.findings.push_back({name, impact, Severity::High});
    return r;
}

ContractRecord analyzed(const std::string& source, const AnalysisReport& report) {
    ContractRecord record;
    record.address = "0x00000000000000000000000000000000000000aa";
    record.source = source;
    record.malicious = true;
    apply_report(record, report);
    return record;
}

std::string fenced(const std::string& body) {
    return "Vulnerabilities: x\nNew Smart Contract:\n```solidity\n" + body + "\n```\nVulnerabilities unable to repair: none";
}

// Looks candidates up by exact source text; anything unknown fails to compile.
AnalyzeFn table(std::map<std::string, AnalysisReport> reports) {
    return [reports = std::move(reports)](std::string_view source) {
        const auto it = reports.find(std::string(source));
        return it == reports.end() ? AnalysisReport::null_report() : it->second;
    };
}

} // namespace

TEST(Prompt, ExactShape) {
    const auto prompt = build_prompt("contract A {}", {"tx-origin"});
    EXPECT_EQ(prompt, std::string(kPromptSystemPart) + " " + std::string(kPromptInstructionPart) +
                          " The smart contract you will repair is contract A {} The vulnerabilities are tx-origin.");
    EXPECT_TRUE(prompt.ends_with("The vulnerabilities are tx-origin."));
    EXPECT_TRUE(build_prompt("c", {"a", "b"}).ends_with("The vulnerabilities are a, b."));
}

TEST(Prompt, CarriesNoLabelOrSeverity) {
    const auto prompt = build_prompt("contract A {}", {"suicidal", "timestamp"});
    for (const char* banned : {"malicious", "HIGH", "MEDIUM", "High", "Medium", "LOW"}) {
        EXPECT_EQ(prompt.find(banned), std::string::npos) << banned;
    }
}

TEST(Prompt, RejectsEmptyNames) {
    for (const std::vector<std::string>& names : {std::vector<std::string>{}, std::vector<std::string>{" "}}) {
        try {
            build_prompt("c", names);
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::EmptyVulnList);
        }
    }
}

TEST(Prompt, SplitAndRecoverSource) {
    const std::string source = "contract A {\n    uint x;\n}";
    const auto prompt = build_prompt(source, {"tx-origin"});
    const auto parts = split_prompt(prompt);
    EXPECT_EQ(parts.system, kPromptSystemPart);
    EXPECT_TRUE(parts.user.starts_with(kPromptInstructionPart));
    EXPECT_EQ(source_from_prompt(prompt), source);
    EXPECT_FALSE(source_from_prompt("hello"));
}

TEST(Extract, FencedAndUnfenced) {
    EXPECT_EQ(extract_contract(fenced("contract A {}")), "contract A {}");
    EXPECT_EQ(extract_contract("```\ncontract B {}\n```"), "contract B {}");
    EXPECT_EQ(extract_contract("Vulnerabilities: x New Smart Contract: contract C {} Vulnerabilities unable to repair: none"),
              "contract C {}");
    EXPECT_EQ(extract_contract("New Smart Contract:\ncontract D {}\n"), "contract D {}");
    EXPECT_FALSE(extract_contract("I have no idea"));
    EXPECT_FALSE(extract_contract("```solidity\n\n```"));
}

TEST(Extract, RefusalHeuristic) {
    EXPECT_TRUE(looks_like_refusal("As an AI developed by OpenAI, I won't do that."));
    EXPECT_TRUE(looks_like_refusal("  I'm sorry, but no."));
    EXPECT_FALSE(looks_like_refusal("I'm sorry for the delay.\n```\ncontract A {}\n```"));
    EXPECT_FALSE(looks_like_refusal(fenced("contract A {}")));
}

TEST(Chat, RequestBody) {
    ChatConfig cfg;
    cfg.model = "m1";
    cfg.temperature = 0.5;
    const auto prompt = build_prompt("contract A {}", {"tx-origin"});
    const auto body = json::parse(chat_request_body(cfg, prompt));
    EXPECT_EQ(body["model"], "m1");
    EXPECT_DOUBLE_EQ(body["temperature"].get<double>(), 0.5);
    ASSERT_EQ(body["messages"].size(), 2u);
    EXPECT_EQ(body["messages"][0]["role"], "system");
    EXPECT_EQ(body["messages"][0]["content"], std::string(kPromptSystemPart));
    EXPECT_EQ(body["messages"][1]["role"], "user");
}

TEST(Chat, SuccessFixture) {
    ::unsetenv("LLM_API_KEY");
    fakes::Transport transport;
    fakes::Clock clock;
    transport.push(200, fakes::fixture("chat_success.json"));
    ChatConfig cfg;
    cfg.base_url = "https://llm.test";
    cfg.api_key = "sk-test";
    const auto content = chat_complete(cfg, build_prompt("contract W {}", {"tx-origin"}), transport, clock);
    ASSERT_EQ(transport.requests.size(), 1u);
    EXPECT_EQ(transport.requests[0].method, "POST");
    EXPECT_EQ(transport.requests[0].url, "https://llm.test/v1/chat/completions");
    EXPECT_EQ(transport.requests[0].headers.at("Authorization"), "Bearer sk-test");
    const auto source = extract_contract(content);
    ASSERT_TRUE(source);
    EXPECT_NE(source->find("require(msg.sender == owner);"), std::string::npos);
    EXPECT_EQ(source->find("tx.origin"), std::string::npos);
}

TEST(Chat, RefusalFixture) {
    fakes::Transport transport;
    fakes::Clock clock;
    transport.push(200, fakes::fixture("chat_refusal.json"));
    try {
        chat_complete(ChatConfig{}, build_prompt("c", {"x"}), transport, clock);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Refusal);
    }
}

TEST(Chat, RateLimitedRetriesThenFails) {
    fakes::Transport transport;
    fakes::Clock clock;
    transport.push(429, fakes::fixture("chat_error.json"));
    ChatConfig cfg;
    cfg.max_retries = 2;
    try {
        chat_complete(cfg, build_prompt("c", {"x"}), transport, clock);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Http);
        EXPECT_EQ(e.detail(), 429);
    }
    EXPECT_EQ(transport.requests.size(), 3u);
    ASSERT_EQ(clock.sleeps.size(), 2u);
    EXPECT_LT(clock.sleeps[0], clock.sleeps[1]);
}

TEST(Chat, RecoversAfterServerError) {
    fakes::Transport transport;
    fakes::Clock clock;
    transport.push(503, "");
    transport.push(200, fakes::fixture("chat_success.json"));
    EXPECT_NO_THROW(chat_complete(ChatConfig{}, build_prompt("c", {"x"}), transport, clock));
    EXPECT_EQ(transport.requests.size(), 2u);
}

TEST(Chat, NonRetryableStatus) {
    fakes::Transport transport;
    fakes::Clock clock;
    transport.push(401, "{}");
    try {
        chat_complete(ChatConfig{}, build_prompt("c", {"x"}), transport, clock);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.detail(), 401);
    }
    EXPECT_EQ(transport.requests.size(), 1u);
}

TEST(Mock, RepairsGeneratedContract) {
    const auto record = generate_contract_with(9, {"suicidal", "tx-origin"});
    const auto prompt = build_prompt(record.source, {"suicidal", "tx-origin"});
    const auto response = mock_repairer(prompt);
    EXPECT_EQ(response, mock_repairer(prompt));
    const auto source = extract_contract(response);
    ASSERT_TRUE(source);
    EXPECT_TRUE(analyze_builtin(*source).findings.empty());
}

TEST(Mock, CleanSourceEchoes) {
    const std::string source = "contract A {\n    uint x;\n}";
    EXPECT_EQ(extract_contract(mock_repairer(build_prompt(source, {"x"}))), source);
}

TEST(SeverityOrder, HighDominates) {
    const auto a = severity_key(report_of({{"a", Severity::High}, {"b", Severity::Medium}}));
    const auto b = severity_key(report_of({{"b", Severity::Medium}}));
    const auto c = severity_key(report_of({{"c", Severity::Low}, {"d", Severity::Low}, {"e", Severity::Medium}}));
    EXPECT_LT(b, a);
    EXPECT_LT(b, c);
    EXPECT_LT(c, a);
}

TEST(Loop, CleanOnFirstAttempt) {
    const auto record = generate_contract_with(2, {"tx-origin"});
    auto r = record;
    apply_report(r, analyze_builtin(r.source));
    std::vector<std::string> prompts;
    const auto session = repair_loop(r, analyze_builtin, [&](std::string_view p) {
        prompts.emplace_back(p);
        return mock_repairer(p);
    });
    EXPECT_EQ(session.outcome, RepairSession::Outcome::Clean);
    EXPECT_EQ(session.attempts.size(), 1u);
    ASSERT_EQ(prompts.size(), 1u);
    EXPECT_TRUE(prompts[0].ends_with("The vulnerabilities are tx-origin."));
    EXPECT_TRUE(session.final_report().findings.empty());
}

TEST(Loop, AlwaysRefusingFails) {
    const auto record = analyzed("A", report_of({{"tx-origin", Severity::Medium}}));
    int calls = 0;
    const auto session = repair_loop(record, table({}), [&](std::string_view) {
        ++calls;
        return std::string("As an AI developed by OpenAI, I won't be producing that contract for you.");
    });
    EXPECT_EQ(session.outcome, RepairSession::Outcome::Failed);
    EXPECT_EQ(calls, 5);
    EXPECT_EQ(session.attempts.size(), 5u);
    for (const auto& a : session.attempts) EXPECT_TRUE(a.error);
    EXPECT_FALSE(session.best_source);
    EXPECT_EQ(session.final_report(), session.report_before);
}

TEST(Loop, PartialImprovementKeepsBest) {
    const auto before = report_of({{"suicidal", Severity::High}, {"tx-origin", Severity::Medium}});
    const auto after = report_of({{"tx-origin", Severity::Medium}});
    const auto record = analyzed("A", before);
    std::vector<std::string> prompts;
    const auto session = repair_loop(record, table({{"B", after}}), [&](std::string_view p) {
        prompts.emplace_back(p);
        return fenced("B");
    });
    EXPECT_EQ(session.outcome, RepairSession::Outcome::Improved);
    EXPECT_EQ(session.best_source, "B");
    EXPECT_EQ(session.final_report(), after);
    EXPECT_EQ(session.attempts.size(), 5u);
    EXPECT_TRUE(prompts[0].ends_with("are suicidal, tx-origin."));
    EXPECT_TRUE(prompts[1].ends_with("is B The vulnerabilities are tx-origin."));
}

TEST(Loop, WorseCandidateLeavesOriginal) {
    const auto before = report_of({{"tx-origin", Severity::Medium}});
    const auto worse = report_of({{"suicidal", Severity::High}});
    const auto session = repair_loop(analyzed("A", before), table({{"W", worse}}),
                                     [](std::string_view) { return fenced("W"); }, 3);
    EXPECT_EQ(session.outcome, RepairSession::Outcome::Unchanged);
    EXPECT_EQ(session.attempts.size(), 3u);
    EXPECT_EQ(session.best_source, "A");
    EXPECT_EQ(session.final_report(), before);
}

TEST(Loop, UncompilableCandidatesAreInvalid) {
    const auto session = repair_loop(analyzed("A", report_of({{"tx-origin", Severity::Medium}})), table({}),
                                     [](std::string_view) { return fenced("garbage"); }, 2);
    EXPECT_EQ(session.outcome, RepairSession::Outcome::Failed);
}

TEST(Loop, LlmErrorsAreRecorded) {
    const auto session = repair_loop(analyzed("A", report_of({{"tx-origin", Severity::Medium}})),
                                     table({{"C", AnalysisReport{}}}), [n = 0](std::string_view) mutable {
                                         if (n++ == 0) throw Error(ErrorCode::Timeout, "Timeout");
                                         return fenced("C");
                                     });
    EXPECT_EQ(session.outcome, RepairSession::Outcome::Clean);
    ASSERT_EQ(session.attempts.size(), 2u);
    EXPECT_TRUE(session.attempts[0].error);
}

TEST(Loop, RejectsUnanalyzedRecord) {
    ContractRecord record;
    record.source = "A";
    EXPECT_THROW(repair_loop(record, table({}), [](std::string_view) { return std::string(); }), Error);
}

TEST(Loop, SessionJson) {
    const auto session = repair_loop(analyzed("A", report_of({{"tx-origin", Severity::Medium}})),
                                     table({{"C", AnalysisReport{}}}), [](std::string_view) { return fenced("C"); });
    const auto j = json::parse(session_to_json_line(session));
    EXPECT_EQ(j["outcome"], "clean");
    EXPECT_EQ(j["best_source"], "C");
    EXPECT_EQ(j["attempts"].size(), 1u);
    EXPECT_EQ(to_string(RepairSession::Outcome::Unchanged), "unchanged");
}

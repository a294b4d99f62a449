/*
 * Copyright 2026 The contract-triage Authors.
 * SPDX-License-Identifier: Apache-2.0
 */
#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "fakes.hpp"
#include "triage/report.hpp"

using namespace triage;
using json = nlohmann::json;

namespace {

ImpactHistogram histogram(std::uint64_t high, std::uint64_t medium, std::uint64_t low, std::uint64_t info,
                          std::uint64_t opt) {
    ImpactHistogram h;
    h.counts[static_cast<std::size_t>(Severity::High)] = high;
    h.counts[static_cast<std::size_t>(Severity::Medium)] = medium;
    h.counts[static_cast<std::size_t>(Severity::Low)] = low;
    h.counts[static_cast<std::size_t>(Severity::Informational)] = info;
    h.counts[static_cast<std::size_t>(Severity::Optimization)] = opt;
    return h;
}

AnalysisReport findings(std::initializer_list<Severity> impacts) {
    AnalysisReport r;
    for (auto s : impacts) r.findings.push_back({"d", s, Severity::High});
    return r;
}

std::vector<RepairSession> sample_sessions() {
    std::vector<RepairSession> out;
    for (std::uint64_t seed : {1, 2, 3}) {
        auto record = generate_contract(seed, true, seed);
        apply_report(record, analyze_builtin(record.source));
        out.push_back(repair_loop(record, analyze_builtin, [](std::string_view p) { return mock_repairer(p); }));
    }
    auto stuck = generate_contract_with(4, {"suicidal"});
    apply_report(stuck, analyze_builtin(stuck.source));
    out.push_back(repair_loop(stuck, analyze_builtin, [](std::string_view) { return std::string("I'm sorry, no."); }, 2));
    return out;
}

} // namespace

TEST(Histogram, CountsByImpact) {
    const auto h = impact_histogram({findings({Severity::Low}), findings({Severity::Optimization, Severity::Optimization}),
                                     AnalysisReport{}});
    EXPECT_EQ(h, histogram(0, 0, 1, 0, 2));
    EXPECT_EQ(h.total(), 3u);
    EXPECT_EQ(impact_histogram({}).total(), 0u);
}

TEST(Reduction, WorkedValues) {
    EXPECT_DOUBLE_EQ(*reduction_percentage(histogram(40, 0, 0, 0, 0), histogram(1, 0, 0, 0, 0)), 0.975);
    EXPECT_NEAR(*reduction_percentage(histogram(30, 30, 0, 0, 0), histogram(0, 2, 0, 0, 0)), 0.9667, 1e-4);
    EXPECT_FALSE(reduction_percentage(histogram(0, 0, 0, 0, 0), histogram(0, 0, 0, 0, 0)));
    EXPECT_DOUBLE_EQ(*reduction_percentage(histogram(0, 1, 0, 0, 0), histogram(0, 2, 0, 0, 0)), -1.0);
}

TEST(Summary, EmptySessions) {
    const auto j = json::parse(summary_json({}, std::nullopt));
    EXPECT_EQ(j["sessions"], 0);
    EXPECT_TRUE(j["reduction"].is_null());
    EXPECT_TRUE(j["classifier_metrics"].is_null());
    EXPECT_EQ(j["histogram_before"]["total"], 0);
    EXPECT_EQ(contracts_csv({}),
              "index,contract_address,malicious,outcome,attempts,findings_before,findings_after,high_before,"
              "high_after,vulnerabilities_before,vulnerabilities_after\n");
}

TEST(Summary, ConsistentWithSessions) {
    const auto sessions = sample_sessions();
    const auto metrics = metrics_from_counts(133, 23, 584, 60);
    const auto j = json::parse(summary_json(sessions, metrics));
    EXPECT_EQ(j["sessions"], sessions.size());

    std::vector<AnalysisReport> before, after;
    for (const auto& s : sessions) {
        before.push_back(s.report_before);
        after.push_back(s.final_report());
    }
    const auto hb = impact_histogram(before);
    const auto ha = impact_histogram(after);
    EXPECT_EQ(j["histogram_before"]["total"], hb.total());
    EXPECT_EQ(j["histogram_after"]["total"], ha.total());
    EXPECT_EQ(j["histogram_before"]["HIGH"], hb.counts[4]);
    EXPECT_DOUBLE_EQ(j["reduction"].get<double>(), *reduction_percentage(hb, ha));
    EXPECT_EQ(j["outcomes"]["clean"], 3);
    EXPECT_EQ(j["outcomes"]["failed"], 1);
    EXPECT_EQ(j["classifier_metrics"]["tp"], 133);

    const auto csv = contracts_csv(sessions);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), static_cast<long>(sessions.size() + 1));
    EXPECT_NE(csv.find(",suicidal,suicidal\n"), std::string::npos);
}

TEST(Summary, MetricsJson) {
    const auto j = json::parse(metrics_to_json(metrics_from_counts(133, 23, 584, 60)));
    EXPECT_EQ(j["fn"], 60);
    EXPECT_NEAR(j["accuracy"].get<double>(), 0.89625, 1e-12);
}

TEST(Chart, MatchesGolden) {
    const auto svg = impact_chart_svg(histogram(12, 20, 5, 3, 1), histogram(0, 2, 1, 3, 1));
    std::ifstream in(std::string(TRIAGE_FIXTURES_DIR) + "/impact_chart.svg");
    std::stringstream golden;
    golden << in.rdbuf();
    if (golden.str() != svg) {
        std::ofstream("impact_chart.actual.svg") << svg;
        FAIL() << "chart differs from fixture; wrote impact_chart.actual.svg";
    }
    EXPECT_TRUE(svg.starts_with("<svg"));
}

TEST(Chart, EmptyHistogramsRender) {
    const auto svg = impact_chart_svg({}, {});
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
    EXPECT_EQ(svg.find("nan"), std::string::npos);
}

TEST(Emit, WritesThreeFiles) {
    const auto dir = std::filesystem::temp_directory_path() / "triage-report-emit";
    std::filesystem::remove_all(dir);
    const auto paths = ReportPaths::in(dir);
    emit_summary(sample_sessions(), std::nullopt, paths);
    EXPECT_TRUE(std::filesystem::exists(paths.summary_json));
    EXPECT_TRUE(std::filesystem::exists(paths.contracts_csv));
    EXPECT_TRUE(std::filesystem::exists(paths.chart_svg));
}

/*
 * Copyright 2026 The contract-triage Authors.
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "triage/analyzer.hpp"
#include "triage/forest.hpp"
#include "triage/repair.hpp"

namespace triage {

struct ImpactHistogram {
    std::array<std::uint64_t, kSeverityLevels> counts{};  // indexed by Severity code

    std::uint64_t total() const noexcept;
    friend bool operator==(const ImpactHistogram&, const ImpactHistogram&) = default;
};

/// Findings by impact across reports; Null reports add nothing.
ImpactHistogram impact_histogram(const std::vector<AnalysisReport>& reports);

/// (before - after) / before; nullopt when before is empty. Negative when
/// the after state has more findings.
std::optional<double> reduction_percentage(const ImpactHistogram& before, const ImpactHistogram& after);

struct ReportPaths {
    std::filesystem::path summary_json;
    std::filesystem::path contracts_csv;
    std::filesystem::path chart_svg;

    /// summary.json, contracts.csv and impact_chart.svg under `dir`.
    static ReportPaths in(const std::filesystem::path& dir);
};

std::string summary_json(const std::vector<RepairSession>& sessions, const std::optional<Metrics>& metrics);
std::string contracts_csv(const std::vector<RepairSession>& sessions);
/// Grouped bars, one group per impact level, before vs after.
std::string impact_chart_svg(const ImpactHistogram& before, const ImpactHistogram& after);

/// Writes all three outputs. Throws Error(Io).
void emit_summary(const std::vector<RepairSession>& sessions, const std::optional<Metrics>& metrics,
                  const ReportPaths& paths);

std::string metrics_to_json(const Metrics& metrics);

} // namespace triage

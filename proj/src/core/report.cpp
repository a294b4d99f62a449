/*
 * Copyright 2026 The contract-triage Authors.
 * SPDX-License-Identifier: Apache-2.0
 */
#include "triage/report.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "csv.hpp"
#include "triage/error.hpp"

namespace triage {

using ordered_json = nlohmann::ordered_json;

std::uint64_t ImpactHistogram::total() const noexcept {
    return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

ImpactHistogram impact_histogram(const std::vector<AnalysisReport>& reports) {
    ImpactHistogram h;
    for (const auto& r : reports) {
        if (!r.ok()) continue;
        for (const auto& f : r.findings) ++h.counts[code(f.impact)];
    }
    return h;
}

std::optional<double> reduction_percentage(const ImpactHistogram& before, const ImpactHistogram& after) {
    const auto b = before.total();
    if (b == 0) return std::nullopt;
    return (static_cast<double>(b) - static_cast<double>(after.total())) / static_cast<double>(b);
}

ReportPaths ReportPaths::in(const std::filesystem::path& dir) {
    return {dir / "summary.json", dir / "contracts.csv", dir / "impact_chart.svg"};
}

namespace {

struct Aggregate {
    ImpactHistogram before;
    ImpactHistogram after;
};

Aggregate aggregate(const std::vector<RepairSession>& sessions) {
    std::vector<AnalysisReport> before, after;
    before.reserve(sessions.size());
    after.reserve(sessions.size());
    for (const auto& s : sessions) {
        before.push_back(s.report_before);
        after.push_back(s.final_report());
    }
    return {impact_histogram(before), impact_histogram(after)};
}

ordered_json histogram_json(const ImpactHistogram& h) {
    ordered_json j;
    for (auto it = kAllSeverities.rbegin(); it != kAllSeverities.rend(); ++it) {
        j[std::string(name(*it))] = h.counts[code(*it)];
    }
    j["total"] = h.total();
    return j;
}

ordered_json metrics_json(const Metrics& m) {
    ordered_json j;
    j["tp"] = m.tp;
    j["fp"] = m.fp;
    j["tn"] = m.tn;
    j["fn"] = m.fn;
    j["accuracy"] = m.accuracy;
    j["f1"] = m.f1;
    j["false_positive_rate"] = m.false_positive_rate;
    return j;
}

std::string join_names(const AnalysisReport& r) {
    std::string out;
    for (const auto& f : r.findings) {
        if (!out.empty()) out += ';';
        out += f.detector;
    }
    return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    out << content;
    if (!out.flush()) throw Error(ErrorCode::Io, "cannot write " + path.string());
}

} // namespace

std::string metrics_to_json(const Metrics& metrics) { return metrics_json(metrics).dump(2) + "\n"; }

std::string summary_json(const std::vector<RepairSession>& sessions, const std::optional<Metrics>& metrics) {
    const auto agg = aggregate(sessions);
    ordered_json j;
    j["sessions"] = sessions.size();
    j["histogram_before"] = histogram_json(agg.before);
    j["histogram_after"] = histogram_json(agg.after);
    const auto reduction = reduction_percentage(agg.before, agg.after);
    j["reduction"] = reduction ? ordered_json(*reduction) : ordered_json();
    ordered_json outcomes;
    for (auto o : {RepairSession::Outcome::Clean, RepairSession::Outcome::Improved,
                   RepairSession::Outcome::Unchanged, RepairSession::Outcome::Failed}) {
        outcomes[std::string(to_string(o))] =
            std::count_if(sessions.begin(), sessions.end(), [o](const auto& s) { return s.outcome == o; });
    }
    j["outcomes"] = std::move(outcomes);
    std::size_t attempts = 0;
    for (const auto& s : sessions) attempts += s.attempts.size();
    j["attempts"] = attempts;
    j["classifier_metrics"] = metrics ? metrics_json(*metrics) : ordered_json();
    return j.dump(2) + "\n";
}

std::string contracts_csv(const std::vector<RepairSession>& sessions) {
    std::string out =
        "index,contract_address,malicious,outcome,attempts,findings_before,findings_after,high_before,high_after,"
        "vulnerabilities_before,vulnerabilities_after\n";
    const auto high = [](const AnalysisReport& r) {
        return std::count_if(r.findings.begin(), r.findings.end(),
                             [](const Finding& f) { return f.impact == Severity::High; });
    };
    for (std::size_t i = 0; i < sessions.size(); ++i) {
        const auto& s = sessions[i];
        const auto& after = s.final_report();
        out += std::to_string(i) + ',' + csv::escape(s.original.address.value_or("")) + ',' +
               (s.original.malicious ? "true" : "false") + ',' + std::string(to_string(s.outcome)) + ',' +
               std::to_string(s.attempts.size()) + ',' + std::to_string(s.report_before.findings.size()) + ',' +
               std::to_string(after.findings.size()) + ',' + std::to_string(high(s.report_before)) + ',' +
               std::to_string(high(after)) + ',' + csv::escape(join_names(s.report_before)) + ',' +
               csv::escape(join_names(after)) + '\n';
    }
    return out;
}

std::string impact_chart_svg(const ImpactHistogram& before, const ImpactHistogram& after) {
    constexpr int kWidth = 640, kHeight = 360;
    constexpr int kLeft = 60, kTop = 40, kPlotW = 540, kPlotH = 260;
    constexpr int kGroupW = kPlotW / kSeverityLevels;
    constexpr int kBarW = 36;

    std::uint64_t max_count = 1;
    for (std::size_t i = 0; i < kSeverityLevels; ++i) {
        max_count = std::max({max_count, before.counts[i], after.counts[i]});
    }
    const auto bar_height = [&](std::uint64_t c) { return static_cast<int>(c * kPlotH / max_count); };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "  <rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"#ffffff\"/>\n";
    svg << "  <text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
        << "Findings by impact level</text>\n";
    const int axis_y = kTop + kPlotH;
    svg << "  <line x1=\"" << kLeft << "\" y1=\"" << axis_y << "\" x2=\"" << kLeft + kPlotW << "\" y2=\"" << axis_y
        << "\" stroke=\"#333333\"/>\n";
    svg << "  <line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << axis_y
        << "\" stroke=\"#333333\"/>\n";
    svg << "  <text x=\"" << kLeft - 6 << "\" y=\"" << kTop + 4 << "\" text-anchor=\"end\">" << max_count
        << "</text>\n";
    svg << "  <text x=\"" << kLeft - 6 << "\" y=\"" << axis_y + 4 << "\" text-anchor=\"end\">0</text>\n";

    int group = 0;
    for (auto it = kAllSeverities.rbegin(); it != kAllSeverities.rend(); ++it, ++group) {
        const int gx = kLeft + group * kGroupW + (kGroupW - 2 * kBarW) / 2;
        const auto b = before.counts[code(*it)];
        const auto a = after.counts[code(*it)];
        const int bh = bar_height(b), ah = bar_height(a);
        svg << "  <rect class=\"before\" x=\"" << gx << "\" y=\"" << axis_y - bh << "\" width=\"" << kBarW
            << "\" height=\"" << bh << "\" fill=\"#d9534f\"/>\n";
        svg << "  <text x=\"" << gx + kBarW / 2 << "\" y=\"" << axis_y - bh - 4 << "\" text-anchor=\"middle\">" << b
            << "</text>\n";
        svg << "  <rect class=\"after\" x=\"" << gx + kBarW << "\" y=\"" << axis_y - ah << "\" width=\"" << kBarW
            << "\" height=\"" << ah << "\" fill=\"#5cb85c\"/>\n";
        svg << "  <text x=\"" << gx + kBarW + kBarW / 2 << "\" y=\"" << axis_y - ah - 4
            << "\" text-anchor=\"middle\">" << a << "</text>\n";
        svg << "  <text x=\"" << gx + kBarW << "\" y=\"" << axis_y + 18 << "\" text-anchor=\"middle\">" << name(*it)
            << "</text>\n";
    }
    const int lx = kLeft + kPlotW - 150;
    svg << "  <rect x=\"" << lx << "\" y=\"" << kTop << "\" width=\"12\" height=\"12\" fill=\"#d9534f\"/>\n";
    svg << "  <text x=\"" << lx + 18 << "\" y=\"" << kTop + 10 << "\">before repair</text>\n";
    svg << "  <rect x=\"" << lx << "\" y=\"" << kTop + 18 << "\" width=\"12\" height=\"12\" fill=\"#5cb85c\"/>\n";
    svg << "  <text x=\"" << lx + 18 << "\" y=\"" << kTop + 28 << "\">after repair</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

void emit_summary(const std::vector<RepairSession>& sessions, const std::optional<Metrics>& metrics,
                  const ReportPaths& paths) {
    const auto agg = aggregate(sessions);
    write_file(paths.summary_json, summary_json(sessions, metrics));
    write_file(paths.contracts_csv, contracts_csv(sessions));
    write_file(paths.chart_svg, impact_chart_svg(agg.before, agg.after));
}

} // namespace triage

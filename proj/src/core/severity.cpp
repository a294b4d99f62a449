/*
 * Copyright 2026 The contract-triage Authors.
 * SPDX-License-Identifier: Apache-2.0
 */
#include "triage/severity.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include "triage/error.hpp"

namespace triage {

std::string_view name(Severity s) noexcept {
    switch (s) {
    case Severity::Optimization: return "OPTIMIZATION";
    case Severity::Informational: return "INFORMATIONAL";
    case Severity::Low: return "LOW";
    case Severity::Medium: return "MEDIUM";
    case Severity::High: return "HIGH";
    }
    return "INFORMATIONAL";
}

std::optional<Severity> parse_severity(std::string_view text) noexcept {
    for (Severity s : kAllSeverities) {
        const auto level = name(s);
        if (level.size() == text.size() &&
            std::equal(level.begin(), level.end(), text.begin(), [](char a, char b) {
                return a == std::toupper(static_cast<unsigned char>(b));
            })) {
            return s;
        }
    }
    return std::nullopt;
}

Severity severity_from_name(std::string_view text) {
    if (auto s = parse_severity(text)) return *s;
    throw Error(ErrorCode::UnknownSeverity, "unknown severity '" + std::string(text) + "'");
}

} // namespace triage

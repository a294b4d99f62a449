/*
 * Copyright 2026 The contract-triage Authors.
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace triage {

/// Five-level impact/confidence scale. The numeric code is the feature value
/// used by the classifier and the histogram bin used by reports.
enum class Severity : std::uint8_t {
    Optimization = 0,
    Informational = 1,
    Low = 2,
    Medium = 3,
    High = 4,
};

inline constexpr std::size_t kSeverityLevels = 5;

inline constexpr std::array<Severity, kSeverityLevels> kAllSeverities = {
    Severity::Optimization, Severity::Informational, Severity::Low, Severity::Medium,
    Severity::High};

constexpr int code(Severity s) noexcept { return static_cast<int>(s); }

/// Uppercase level name as persisted ("HIGH", "INFORMATIONAL", ...).
std::string_view name(Severity s) noexcept;

/// Case-insensitive lookup; nullopt for anything that is not a level name.
std::optional<Severity> parse_severity(std::string_view text) noexcept;

/// Throws Error(UnknownSeverity) on failure.
Severity severity_from_name(std::string_view text);

} // namespace triage

/*
 * Copyright 2026 The contract-triage Authors.
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <stdexcept>
#include <string>

namespace triage {

enum class ErrorCode {
    InvalidArgument,
    Io,
    Parse,
    InsufficientLabel,
    UnknownDetector,
    UnknownSeverity,
    MissingAnalysis,
    DimensionMismatch,
    LengthMismatch,
    EmptyNode,
    EmptyVulnList,
    TooManyVulns,
    Http,
    NotVerified,
    RateLimited,
    Refusal,
    Timeout,
    Internal,
};

const char* to_string(ErrorCode code) noexcept;

/// Every failure raised by the library. `detail` carries the line number for
/// Parse errors read from a file and the HTTP status for Http errors; 0
/// otherwise.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, long detail = 0)
        : std::runtime_error(message), code_(code), detail_(detail) {}

    ErrorCode code() const noexcept { return code_; }
    long detail() const noexcept { return detail_; }

private:
    ErrorCode code_;
    long detail_;
};

} // namespace triage

/*
 * Copyright 2026 The contract-triage Authors.
 * SPDX-License-Identifier: Apache-2.0
 */
#include "triage/error.hpp"

namespace triage {

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "IoError";
    case ErrorCode::Parse: return "ParseError";
    case ErrorCode::InsufficientLabel: return "InsufficientLabel";
    case ErrorCode::UnknownDetector: return "UnknownDetector";
    case ErrorCode::UnknownSeverity: return "UnknownSeverity";
    case ErrorCode::MissingAnalysis: return "MissingAnalysis";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::EmptyNode: return "EmptyNode";
    case ErrorCode::EmptyVulnList: return "EmptyVulnList";
    case ErrorCode::TooManyVulns: return "TooManyVulns";
    case ErrorCode::Http: return "HttpError";
    case ErrorCode::NotVerified: return "NotVerified";
    case ErrorCode::RateLimited: return "RateLimited";
    case ErrorCode::Refusal: return "RefusalError";
    case ErrorCode::Timeout: return "TimeoutError";
    case ErrorCode::Internal: return "InternalError";
    }
    return "InternalError";
}

} // namespace triage

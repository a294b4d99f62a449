/*
 * Copyright 2026 The contract-triage Authors.
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace triage {

/// Compiler versions tried, oldest first, when a contract is analyzed.
inline constexpr std::array<std::string_view, 5> kVersionLadder = {
    "0.4.26", "0.5.17", "0.6.12", "0.7.6", "0.8.21"};

/// One region of Solidity text as seen by the comment/string-aware scanner.
struct SourceSpan {
    enum class Kind { Code, LineComment, BlockComment, StringLiteral };
    Kind kind;
    std::size_t begin;
    std::size_t end;
};

/// Splits source into code, comment, and string-literal spans covering every
/// byte exactly once. Unterminated comments/strings run to end of input.
std::vector<SourceSpan> scan_source(std::string_view source);

/// Copy of `source` with every comment and string-literal byte replaced by a
/// space (newlines kept), so offsets line up with the original.
std::string blank_non_code(std::string_view source);

/// True for "X.Y.Z" style dotted numerics.
bool is_dotted_version(std::string_view version) noexcept;

/// Replaces every `pragma solidity <expr>;` that sits in code (not in a comment
/// or string) with `pragma solidity >=<version>;`. Other bytes are untouched.
/// Throws Error(InvalidArgument) when `version` is not dotted-numeric.
std::string rewrite_pragma(std::string_view source, std::string_view version);

} // namespace triage

/*
 * Copyright 2026 The contract-triage Authors.
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace triage::csv {

struct Row {
    std::size_t line;  // 1-based line where the row starts
    std::vector<std::string> fields;
};

/// RFC 4180: comma separated, double-quoted fields may hold commas, newlines,
/// and "" escapes. Accepts LF or CRLF row endings. Throws Error(Parse) on an
/// unterminated quote.
std::vector<Row> parse(std::string_view text);

/// Quotes the field when it contains a comma, quote, or line break.
std::string escape(std::string_view field);

} // namespace triage::csv

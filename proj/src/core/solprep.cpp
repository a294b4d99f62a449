/*
 * Copyright 2026 The contract-triage Authors.
 * SPDX-License-Identifier: Apache-2.0
 */
#include "triage/solprep.hpp"

#include <cctype>

#include "text.hpp"
#include "triage/error.hpp"

namespace triage {

std::vector<SourceSpan> scan_source(std::string_view src) {
    using Kind = SourceSpan::Kind;
    std::vector<SourceSpan> spans;
    auto push = [&](Kind kind, std::size_t begin, std::size_t end) {
        if (begin == end) return;
        if (!spans.empty() && spans.back().kind == kind && spans.back().end == begin) {
            spans.back().end = end;
        } else {
            spans.push_back({kind, begin, end});
        }
    };

    std::size_t i = 0;
    std::size_t code_start = 0;
    const std::size_t n = src.size();
    while (i < n) {
        const char c = src[i];
        if (c == '/' && i + 1 < n && src[i + 1] == '/') {
            push(Kind::Code, code_start, i);
            std::size_t end = src.find('\n', i);
            if (end == std::string_view::npos) end = n;
            push(Kind::LineComment, i, end);
            i = code_start = end;
        } else if (c == '/' && i + 1 < n && src[i + 1] == '*') {
            push(Kind::Code, code_start, i);
            std::size_t end = src.find("*/", i + 2);
            end = end == std::string_view::npos ? n : end + 2;
            push(Kind::BlockComment, i, end);
            i = code_start = end;
        } else if (c == '"' || c == '\'') {
            push(Kind::Code, code_start, i);
            std::size_t j = i + 1;
            while (j < n && src[j] != c && src[j] != '\n') {
                j += (src[j] == '\\' && j + 1 < n) ? 2 : 1;
            }
            const std::size_t end = j < n && src[j] == c ? j + 1 : std::min(j, n);
            push(Kind::StringLiteral, i, end);
            i = code_start = end;
        } else {
            ++i;
        }
    }
    push(Kind::Code, code_start, n);
    return spans;
}

std::string blank_non_code(std::string_view source) {
    std::string out(source);
    for (const auto& span : scan_source(source)) {
        if (span.kind == SourceSpan::Kind::Code) continue;
        for (std::size_t i = span.begin; i < span.end; ++i) {
            if (out[i] != '\n') out[i] = ' ';
        }
    }
    return out;
}

bool is_dotted_version(std::string_view version) noexcept {
    if (version.empty()) return false;
    bool digit_run = false;
    for (char c : version) {
        if (std::isdigit(static_cast<unsigned char>(c))) {
            digit_run = true;
        } else if (c == '.' && digit_run) {
            digit_run = false;
        } else {
            return false;
        }
    }
    return digit_run;
}

std::string rewrite_pragma(std::string_view source, std::string_view version) {
    if (!is_dotted_version(version)) {
        throw Error(ErrorCode::InvalidArgument, "not a dotted version: '" + std::string(version) + "'");
    }
    const std::string code = blank_non_code(source);
    const std::string replacement = "pragma solidity >=" + std::string(version) + ";";

    std::string out;
    out.reserve(source.size() + 16);
    std::size_t copied = 0;
    std::size_t pos = 0;
    while ((pos = text::find_word(code, "pragma", pos)) != std::string::npos) {
        std::size_t p = text::skip_space(code, pos + 6);
        if (!text::word_at(code, p, "solidity")) {
            pos += 6;
            continue;
        }
        const std::size_t semi = code.find(';', p + 8);
        if (semi == std::string::npos) break;
        out.append(source.substr(copied, pos - copied));
        out += replacement;
        copied = pos = semi + 1;
    }
    out.append(source.substr(copied));
    return out;
}

} // namespace triage

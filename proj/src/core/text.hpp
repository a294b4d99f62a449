/*
 * Copyright 2026 The contract-triage Authors.
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cctype>
#include <string>
#include <string_view>

namespace triage::text {

inline bool is_ident_char(char c) noexcept {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

inline bool is_space(char c) noexcept { return std::isspace(static_cast<unsigned char>(c)) != 0; }

inline std::size_t skip_space(std::string_view s, std::size_t pos) noexcept {
    while (pos < s.size() && is_space(s[pos])) ++pos;
    return pos;
}

/// True if `word` starts at pos and is not part of a longer identifier.
inline bool word_at(std::string_view s, std::size_t pos, std::string_view word) noexcept {
    if (s.substr(pos, word.size()) != word) return false;
    if (pos > 0 && is_ident_char(s[pos - 1])) return false;
    const std::size_t end = pos + word.size();
    return end >= s.size() || !is_ident_char(s[end]);
}

/// Next identifier-bounded occurrence of `word` at or after `from`.
inline std::size_t find_word(std::string_view s, std::string_view word, std::size_t from = 0) noexcept {
    for (std::size_t pos = s.find(word, from); pos != std::string_view::npos; pos = s.find(word, pos + 1)) {
        if (word_at(s, pos, word)) return pos;
    }
    return std::string_view::npos;
}

inline std::string_view trim(std::string_view s) noexcept {
    std::size_t b = 0, e = s.size();
    while (b < e && is_space(s[b])) ++b;
    while (e > b && is_space(s[e - 1])) --e;
    return s.substr(b, e - b);
}

inline bool starts_with_icase(std::string_view s, std::string_view prefix) noexcept {
    if (s.size() < prefix.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(s[i])) != std::tolower(static_cast<unsigned char>(prefix[i])))
            return false;
    }
    return true;
}

} // namespace triage::text

/*
 * Copyright 2026 The contract-triage Authors.
 * SPDX-License-Identifier: Apache-2.0
 */
// Token-pattern detectors for the offline analyzer. Everything here runs on
// comment/string-blanked text, so byte offsets match the original source.

#include <algorithm>
#include <array>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "text.hpp"
#include "triage/analyzer.hpp"
#include "triage/solprep.hpp"

namespace triage {
namespace {

using text::find_word;
using text::is_ident_char;
using text::skip_space;
using text::word_at;

constexpr std::size_t npos = std::string_view::npos;

struct Range {
    std::size_t begin;  // first byte inside the braces
    std::size_t end;    // position of the closing brace
};

struct FunctionBody {
    Range body;
    const std::set<std::string>* state_vars;
};

bool is_open(char c) { return c == '(' || c == '[' || c == '{'; }
bool is_close(char c) { return c == ')' || c == ']' || c == '}'; }

/// Position of the bracket closing the one at `open`; size() if unbalanced.
std::size_t match_close(std::string_view code, std::size_t open) {
    int depth = 0;
    for (std::size_t i = open; i < code.size(); ++i) {
        if (is_open(code[i])) ++depth;
        else if (is_close(code[i]) && --depth == 0) return i;
    }
    return code.size();
}

/// Matches `a . b` with optional whitespace around the dot; returns the end
/// offset or npos.
std::size_t match_member(std::string_view code, std::size_t pos, std::string_view object,
                         std::string_view member) {
    if (!word_at(code, pos, object)) return npos;
    std::size_t p = skip_space(code, pos + object.size());
    if (p >= code.size() || code[p] != '.') return npos;
    p = skip_space(code, p + 1);
    if (!word_at(code, p, member)) return npos;
    return p + member.size();
}

/// Occurrences of `object.member` (e.g. tx.origin).
std::vector<std::size_t> find_member(std::string_view code, std::string_view object, std::string_view member) {
    std::vector<std::size_t> hits;
    for (std::size_t p = find_word(code, object); p != npos; p = find_word(code, object, p + 1)) {
        if (match_member(code, p, object, member) != npos) hits.push_back(p);
    }
    return hits;
}

/// `.name` followed (after spaces) by one of `next` characters; returns the
/// offset of the dot for each hit.
std::vector<std::size_t> find_dot_call(std::string_view code, std::string_view name, char next) {
    std::vector<std::size_t> hits;
    for (std::size_t p = find_word(code, name); p != npos; p = find_word(code, name, p + 1)) {
        std::size_t dot = p;
        while (dot > 0 && text::is_space(code[dot - 1])) --dot;
        if (dot == 0 || code[dot - 1] != '.') continue;
        const std::size_t after = skip_space(code, p + name.size());
        if (after < code.size() && code[after] == next) hits.push_back(dot - 1);
    }
    return hits;
}

std::string identifier_ending_at(std::string_view code, std::size_t end) {
    std::size_t e = end;
    while (e > 0 && text::is_space(code[e - 1])) --e;
    std::size_t b = e;
    while (b > 0 && is_ident_char(code[b - 1])) --b;
    return std::string(code.substr(b, e - b));
}

std::string first_word(std::string_view s) {
    const std::size_t b = skip_space(s, 0);
    std::size_t e = b;
    while (e < s.size() && is_ident_char(s[e])) ++e;
    return std::string(s.substr(b, e - b));
}

/// State variable names declared at the top level of a contract body.
std::set<std::string> collect_state_vars(std::string_view code, Range body) {
    static const std::set<std::string> kNotState = {
        "function", "modifier", "event",    "error",   "using",  "struct", "enum",
        "constructor", "fallback", "receive", "pragma", "import", "type"};
    std::set<std::string> vars;
    std::size_t item_start = body.begin;
    for (std::size_t i = body.begin; i < body.end; ++i) {
        const char c = code[i];
        if (c == '{' || c == '(' || c == '[') {
            const std::size_t close = match_close(code, i);
            if (c == '{' && close < body.end) {
                // A member with a body (function, struct, ...) ends at its brace.
                i = close;
                item_start = i + 1;
                continue;
            }
            i = std::min(close, body.end);
            continue;
        }
        if (c != ';') continue;
        const auto item = code.substr(item_start, i - item_start);
        item_start = i + 1;
        if (kNotState.count(first_word(item))) continue;
        // Name is the last identifier before a top-level '=' or the ';'.
        std::size_t stop = item.size();
        int depth = 0;
        for (std::size_t k = 0; k < item.size(); ++k) {
            if (is_open(item[k])) ++depth;
            else if (is_close(item[k])) --depth;
            else if (depth == 0 && item[k] == '=' && (k + 1 >= item.size() || item[k + 1] != '>')) {
                stop = k;
                break;
            }
        }
        auto name = identifier_ending_at(item, stop);
        if (!name.empty()) vars.insert(std::move(name));
    }
    return vars;
}

class CodeModel {
public:
    explicit CodeModel(std::string code) : code_(std::move(code)) {
        find_contracts();
        find_functions();
    }

    std::string_view code() const { return code_; }
    const std::vector<FunctionBody>& functions() const { return functions_; }

private:
    void find_contracts() {
        static constexpr std::array<std::string_view, 3> kKinds = {"contract", "library", "interface"};
        for (auto kind : kKinds) {
            for (std::size_t p = find_word(code_, kind); p != npos; p = find_word(code_, kind, p + 1)) {
                const std::size_t open = code_.find_first_of("{;", p);
                if (open == npos || code_[open] != '{') continue;
                const std::size_t close = match_close(code_, open);
                Range r{open + 1, close};
                contracts_.push_back(r);
                state_vars_.push_back(collect_state_vars(code_, r));
            }
        }
    }

    void find_functions() {
        static constexpr std::array<std::string_view, 5> kKinds = {"function", "constructor", "modifier",
                                                                   "fallback", "receive"};
        static const std::set<std::string> kEmpty;
        for (auto kind : kKinds) {
            for (std::size_t p = find_word(code_, kind); p != npos; p = find_word(code_, kind, p + 1)) {
                // Header runs to the first '{' or ';' outside parentheses.
                std::size_t i = p + kind.size();
                int depth = 0;
                for (; i < code_.size(); ++i) {
                    const char c = code_[i];
                    if (c == '(') ++depth;
                    else if (c == ')') --depth;
                    else if (depth == 0 && (c == '{' || c == ';')) break;
                }
                if (i >= code_.size() || code_[i] != '{') continue;
                Range body{i + 1, match_close(code_, i)};
                const std::set<std::string>* vars = &kEmpty;
                for (std::size_t k = 0; k < contracts_.size(); ++k) {
                    if (contracts_[k].begin <= p && p < contracts_[k].end) vars = &state_vars_[k];
                }
                functions_.push_back({body, vars});
            }
        }
        std::sort(functions_.begin(), functions_.end(),
                  [](const FunctionBody& a, const FunctionBody& b) { return a.body.begin < b.body.begin; });
    }

    std::string code_;
    std::vector<Range> contracts_;
    std::vector<std::set<std::string>> state_vars_;
    std::vector<FunctionBody> functions_;
};

/// End of the statement containing `pos`: the next ';' at bracket depth 0.
std::size_t statement_end(std::string_view code, std::size_t pos, std::size_t limit) {
    int depth = 0;
    for (std::size_t i = pos; i < limit; ++i) {
        if (is_open(code[i])) ++depth;
        else if (is_close(code[i])) {
            if (--depth < 0) return i;
        } else if (code[i] == ';' && depth == 0) {
            return i;
        }
    }
    return limit;
}

/// Value-carrying low-level call starting at the '.' of `.call`.
bool is_value_call(std::string_view code, std::size_t dot) {
    std::size_t p = skip_space(code, dot + 1);
    if (!word_at(code, p, "call")) return false;
    p = skip_space(code, p + 4);
    if (p < code.size() && code[p] == '{') {
        p = skip_space(code, p + 1);
        return word_at(code, p, "value") && code[skip_space(code, p + 5)] == ':';
    }
    if (p < code.size() && code[p] == '.') {
        p = skip_space(code, p + 1);
        return word_at(code, p, "value") && code[skip_space(code, p + 5)] == '(';
    }
    return false;
}

/// Offset just past `.call{...}(...)` or `.call.value(...)(...)`; `limit` if unbalanced.
std::size_t value_call_end(std::string_view code, std::size_t dot, std::size_t limit) {
    std::size_t p = skip_space(code, skip_space(code, dot + 1) + 4);
    if (p < limit && code[p] == '.') {
        p = skip_space(code, p + 1) + 5;  // value
        p = skip_space(code, p);
    }
    for (int group = 0; group < 2 && p < limit; ++group) {
        if (code[p] != '{' && code[p] != '(') return limit;
        const std::size_t close = match_close(code, p);
        if (close >= limit) return limit;
        p = skip_space(code, close + 1);
    }
    return p;
}

/// Whether the identifier at [pos, pos+len) is written to.
bool is_assignment_target(std::string_view code, std::size_t pos, std::size_t len) {
    std::size_t before = pos;
    while (before > 0 && text::is_space(code[before - 1])) --before;
    if (before >= 2 && code.substr(before - 2, 2) == "++") return true;
    if (before >= 2 && code.substr(before - 2, 2) == "--") return true;
    if (before >= 6 && word_at(code, before - 6, "delete")) return true;

    std::size_t p = skip_space(code, pos + len);
    // Skip index and member access: balances[a][b].field
    for (;;) {
        if (p < code.size() && code[p] == '[') {
            p = skip_space(code, match_close(code, p) + 1);
        } else if (p < code.size() && code[p] == '.') {
            p = skip_space(code, p + 1);
            while (p < code.size() && is_ident_char(code[p])) ++p;
            p = skip_space(code, p);
        } else {
            break;
        }
    }
    if (p >= code.size()) return false;
    const auto rest = code.substr(p, 4);
    if (rest.starts_with("++") || rest.starts_with("--")) return true;
    if (rest.starts_with("==") || rest.starts_with("=>")) return false;
    if (rest.starts_with("=")) return true;
    static constexpr std::array<std::string_view, 10> kCompound = {"+=", "-=", "*=", "/=", "%=",
                                                                  "|=", "&=", "^=", "<<=", ">>="};
    return std::any_of(kCompound.begin(), kCompound.end(), [&](auto op) { return rest.starts_with(op); });
}

bool detect_reentrancy(const CodeModel& model) {
    const auto code = model.code();
    for (const auto& fn : model.functions()) {
        const auto body = code.substr(0, fn.body.end);
        std::vector<std::size_t> calls;
        for (auto d : find_dot_call(body, "call", '{')) calls.push_back(d);
        for (auto d : find_dot_call(body, "call", '.')) calls.push_back(d);
        for (std::size_t dot : calls) {
            if (dot < fn.body.begin || !is_value_call(code, dot)) continue;
            // State variables referenced up to the end of the call, including its arguments.
            const std::size_t call_end = value_call_end(code, dot, fn.body.end);
            std::set<std::string> used;
            for (const auto& var : *fn.state_vars) {
                const auto hit = find_word(code.substr(0, call_end), var, fn.body.begin);
                if (hit != npos) used.insert(var);
            }
            const std::size_t after = std::min(call_end, statement_end(code, dot, fn.body.end));
            for (const auto& var : used) {
                for (std::size_t p = find_word(code, var, after); p != npos && p < fn.body.end;
                     p = find_word(code, var, p + 1)) {
                    if (is_assignment_target(code, p, var.size())) return true;
                }
            }
        }
    }
    return false;
}

bool has_sender_guard(std::string_view code, std::size_t from, std::size_t to) {
    for (std::size_t p = find_word(code, "require", from); p != npos && p < to;
         p = find_word(code, "require", p + 1)) {
        std::size_t q = skip_space(code, p + 7);
        if (q >= code.size() || code[q] != '(') continue;
        q = skip_space(code, q + 1);
        if (match_member(code, q, "msg", "sender") != npos) return true;
    }
    return false;
}

bool detect_suicidal(const CodeModel& model) {
    const auto code = model.code();
    for (const auto& fn : model.functions()) {
        for (std::size_t p = find_word(code, "selfdestruct", fn.body.begin); p != npos && p < fn.body.end;
             p = find_word(code, "selfdestruct", p + 1)) {
            const std::size_t paren = skip_space(code, p + 12);
            if (paren >= code.size() || code[paren] != '(') continue;
            if (!has_sender_guard(code, fn.body.begin, p)) return true;
        }
    }
    return false;
}

bool has_comparison(std::string_view region) {
    for (std::size_t i = 0; i < region.size(); ++i) {
        const char c = region[i];
        const char next = i + 1 < region.size() ? region[i + 1] : '\0';
        const char prev = i > 0 ? region[i - 1] : '\0';
        if ((c == '=' || c == '!') && next == '=') return true;
        if (c == '<' && next != '<' && prev != '<') return true;
        if (c == '>' && next != '>' && prev != '>' && prev != '=') return true;
    }
    return false;
}

/// True if the expression at `pos` is compared or passed to require().
bool in_comparison_or_require(std::string_view code, std::size_t pos, std::size_t len) {
    // Innermost expression region: bounded by statement delimiters or the
    // nearest unmatched parentheses.
    std::size_t left = pos;
    int depth = 0;
    while (left > 0) {
        const char c = code[left - 1];
        if (c == ')' || c == ']') ++depth;
        else if (c == '(' || c == '[') {
            if (depth == 0) break;
            --depth;
        } else if (depth == 0 && (c == ';' || c == '{' || c == '}' || c == ',')) {
            break;
        }
        --left;
    }
    std::size_t right = pos + len;
    depth = 0;
    while (right < code.size()) {
        const char c = code[right];
        if (c == '(' || c == '[') ++depth;
        else if (c == ')' || c == ']') {
            if (depth == 0) break;
            --depth;
        } else if (depth == 0 && (c == ';' || c == '{' || c == '}' || c == ',')) {
            break;
        }
        ++right;
    }
    if (has_comparison(code.substr(left, right - left))) return true;

    // Walk out through enclosing parentheses looking for require( ... ).
    depth = 0;
    for (std::size_t i = pos; i > 0; --i) {
        const char c = code[i - 1];
        if (c == ')' || c == ']') ++depth;
        else if (c == '(' || c == '[') {
            if (depth > 0) {
                --depth;
                continue;
            }
            if (c == '(' && identifier_ending_at(code, i - 1) == "require") return true;
        } else if (depth == 0 && (c == ';' || c == '{' || c == '}')) {
            return false;
        }
    }
    return false;
}

bool detect_timestamp(std::string_view code) {
    for (std::size_t p : find_member(code, "block", "timestamp")) {
        const std::size_t end = match_member(code, p, "block", "timestamp");
        if (in_comparison_or_require(code, p, end - p)) return true;
    }
    for (std::size_t p = find_word(code, "now"); p != npos; p = find_word(code, "now", p + 1)) {
        std::size_t before = p;
        while (before > 0 && text::is_space(code[before - 1])) --before;
        if (before > 0 && code[before - 1] == '.') continue;
        if (in_comparison_or_require(code, p, 3)) return true;
    }
    return false;
}

bool detect_tx_origin(std::string_view code) { return !find_member(code, "tx", "origin").empty(); }

/// Strips leading `else` and `if (...)` guards from a statement prefix.
std::string_view strip_control_prefix(std::string_view prefix) {
    for (;;) {
        prefix = text::trim(prefix);
        if (word_at(prefix, 0, "else")) {
            prefix.remove_prefix(4);
            continue;
        }
        if (word_at(prefix, 0, "if")) {
            const std::size_t open = skip_space(prefix, 2);
            if (open >= prefix.size() || prefix[open] != '(') return prefix;
            const std::size_t close = match_close(prefix, open);
            if (close >= prefix.size()) return prefix;
            prefix.remove_prefix(close + 1);
            continue;
        }
        return prefix;
    }
}

bool detect_unchecked_send(std::string_view code) {
    static const std::set<std::string> kConsumers = {"return", "require", "assert", "emit", "revert",
                                                     "while",  "for",     "bool",   "if"};
    for (std::size_t dot : find_dot_call(code, "send", '(')) {
        // The call must be the whole statement: `<target>.send(...);`
        const std::size_t open = code.find('(', dot);
        const std::size_t close = match_close(code, open);
        if (close >= code.size()) continue;
        const std::size_t after = skip_space(code, close + 1);
        if (after >= code.size() || code[after] != ';') continue;

        std::size_t start = dot;
        int depth = 0;
        bool nested = false;
        while (start > 0) {
            const char c = code[start - 1];
            if (c == ')' || c == ']') ++depth;
            else if (c == '(' || c == '[') {
                if (depth == 0) {
                    nested = true;
                    break;
                }
                --depth;
            } else if (depth == 0 && (c == ';' || c == '{' || c == '}')) {
                break;
            }
            --start;
        }
        if (nested) continue;
        const auto prefix = strip_control_prefix(code.substr(start, dot - start));
        if (prefix.empty() || prefix.find('=') != std::string_view::npos) continue;
        if (kConsumers.count(first_word(prefix))) continue;
        return true;
    }
    return false;
}

} // namespace

AnalysisReport analyze_builtin(std::string_view source) {
    const CodeModel model(blank_non_code(source));
    const auto code = model.code();

    AnalysisReport report;
    const auto& registry = DetectorRegistry::builtin();
    auto emit = [&](const char* detector) {
        const auto& info = registry.at(detector);
        report.findings.push_back({detector, info.impact, info.confidence});
    };
    if (detect_reentrancy(model)) emit("reentrancy-eth");
    if (detect_suicidal(model)) emit("suicidal");
    if (detect_timestamp(code)) emit("timestamp");
    if (detect_tx_origin(code)) emit("tx-origin");
    if (detect_unchecked_send(code)) emit("unchecked-send");
    return report;
}

} // namespace triage

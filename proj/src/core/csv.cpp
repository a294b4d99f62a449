/*
 * Copyright 2026 The contract-triage Authors.
 * SPDX-License-Identifier: Apache-2.0
 */
#include "csv.hpp"

#include "triage/error.hpp"

namespace triage::csv {

std::vector<Row> parse(std::string_view text) {
    std::vector<Row> rows;
    Row row{1, {}};
    std::string field;
    bool quoted = false;
    bool field_started = false;
    std::size_t line = 1;
    std::size_t quote_line = 0;

    auto end_field = [&] {
        row.fields.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_row = [&] {
        end_field();
        if (!(row.fields.size() == 1 && row.fields[0].empty())) rows.push_back(std::move(row));
        row = Row{line, {}};
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                if (c == '\n') ++line;
                field += c;
            }
            continue;
        }
        switch (c) {
        case '"':
            if (!field_started) {
                quoted = true;
                field_started = true;
                quote_line = line;
            } else {
                field += c;
            }
            break;
        case ',':
            end_field();
            break;
        case '\r':
            if (i + 1 < text.size() && text[i + 1] == '\n') break;
            field += c;
            break;
        case '\n':
            ++line;
            end_row();
            break;
        default:
            field += c;
            field_started = true;
        }
    }
    if (quoted) {
        throw Error(ErrorCode::Parse, "unterminated quoted field starting on line " + std::to_string(quote_line),
                    static_cast<long>(quote_line));
    }
    if (field_started || !field.empty() || !row.fields.empty()) end_row();
    return rows;
}

std::string escape(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

} // namespace triage::csv

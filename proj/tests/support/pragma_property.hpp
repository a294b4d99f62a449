/*
 * Copyright 2026 The contract-triage Authors.
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

// Random sources built from pieces whose expected rewrite is known up front:
// live directives become ">=V", anything inside a comment or string stays.

#include <cstdint>
#include <random>
#include <string>

namespace property {

struct PragmaCase {
    std::string source;
    std::string expected;
    int live_directives = 0;
    int hidden_directives = 0;
};

inline PragmaCase make_pragma_case(std::uint64_t seed, const std::string& version) {
    std::mt19937_64 rng(seed);
    auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
    static const char* kExprs[] = {"^0.4.11", ">=0.5.0 <0.9.0", "0.8.0", "~0.6.2", ">=0.4.22<0.6.0", "=0.7.6"};
    static const char* kGaps[] = {" ", "  ", "\t", "\n", " \n  "};
    static const char* kFiller[] = {
        "contract A {}\n", "uint256 x = 1;\n", "\n", "library L { function f() internal {} }\n",
        "pragma experimental ABIEncoderV2;\n", "// plain comment\n", "/* block */\n",
        "string s = \"no directive here\";\n", "import \"./B.sol\";\n", "solidity_word = 2;\n",
        "pragmatic = 1;\n",
    };
    auto expr = [&] { return std::string(kExprs[pick(std::size(kExprs))]); };
    // Line comments and strings end at a newline, so their directives stay on one line.
    auto directive = [&](bool multiline) {
        const std::size_t gaps = multiline ? std::size(kGaps) : 3;
        return std::string("pragma") + kGaps[pick(gaps)] + "solidity" + kGaps[pick(3)] + expr() + ";";
    };

    PragmaCase c;
    const std::size_t pieces = 1 + pick(12);
    for (std::size_t i = 0; i < pieces; ++i) {
        std::string hidden;
        switch (pick(7)) {
        case 0:
        case 1: {
            const auto live = directive(true);
            c.source += live;
            c.expected += "pragma solidity >=" + version + ";";
            ++c.live_directives;
            const std::string tail = pick(2) ? "\n" : " ";
            c.source += tail;
            c.expected += tail;
            continue;
        }
        case 2: hidden = "// " + directive(false) + "\n"; break;
        case 3: hidden = "/* " + directive(true) + (pick(2) ? "\n * more */" : " */"); break;
        case 4: hidden = "string s = \"" + directive(false) + "\";\n"; break;
        case 5: hidden = "bytes b = '" + directive(false) + " \\' still inside';\n"; break;
        default: {
            const std::string f = kFiller[pick(std::size(kFiller))];
            c.source += f;
            c.expected += f;
            continue;
        }
        }
        ++c.hidden_directives;
        c.source += hidden;
        c.expected += hidden;
    }
    return c;
}

} // namespace property

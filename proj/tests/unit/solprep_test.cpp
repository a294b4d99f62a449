/*
 * Copyright 2026 The contract-triage Authors.
 * SPDX-License-Identifier: Apache-2.0
 */
#include <gtest/gtest.h>

#include "pragma_property.hpp"
#include "triage/error.hpp"
#include "triage/solprep.hpp"

using namespace triage;

TEST(Solprep, LadderIsFixed) {
    const std::vector<std::string> expected{"0.4.26", "0.5.17", "0.6.12", "0.7.6", "0.8.21"};
    EXPECT_EQ(std::vector<std::string>(kVersionLadder.begin(), kVersionLadder.end()), expected);
}

TEST(Solprep, RewritesLiveDirective) {
    EXPECT_EQ(rewrite_pragma("pragma solidity ^0.4.11;\ncontract A{}", "0.4.26"),
              "pragma solidity >=0.4.26;\ncontract A{}");
}

TEST(Solprep, LeavesCommentedDirective) {
    const std::string src = "/* pragma solidity ^0.5.0; */\ncontract A{}";
    EXPECT_EQ(rewrite_pragma(src, "0.8.21"), src);
}

TEST(Solprep, RewritesAllDirectivesAndSkipsExperimental) {
    const std::string src =
        "pragma solidity >=0.4.22 <0.6.0;\npragma experimental ABIEncoderV2;\n"
        "string s = \"pragma solidity 0.1.0;\";\npragma  solidity\n  0.5.0 ;";
    EXPECT_EQ(rewrite_pragma(src, "0.6.12"),
              "pragma solidity >=0.6.12;\npragma experimental ABIEncoderV2;\n"
              "string s = \"pragma solidity 0.1.0;\";\npragma solidity >=0.6.12;");
}

TEST(Solprep, IdempotentAndNoopWithoutDirective) {
    const std::string src = "pragma solidity ^0.8.0;\ncontract A {}";
    const auto once = rewrite_pragma(src, "0.7.6");
    EXPECT_EQ(rewrite_pragma(once, "0.7.6"), once);
    EXPECT_EQ(rewrite_pragma("contract A {}", "0.7.6"), "contract A {}");
}

TEST(Solprep, RejectsNonNumericVersion) {
    EXPECT_THROW(rewrite_pragma("x", "^0.8"), Error);
    EXPECT_TRUE(is_dotted_version("0.8.21"));
    EXPECT_FALSE(is_dotted_version("0.8."));
}

TEST(Solprep, BlankingPreservesOffsets) {
    const std::string src = "a // b\n/* c */ \"d\" 'e\\'' f";
    const auto blank = blank_non_code(src);
    ASSERT_EQ(blank.size(), src.size());
    EXPECT_EQ(blank[0], 'a');
    EXPECT_EQ(blank.back(), 'f');
    EXPECT_EQ(blank.find('b'), std::string::npos);
    EXPECT_EQ(blank.find('c'), std::string::npos);
    EXPECT_EQ(blank.find('d'), std::string::npos);
    EXPECT_EQ(blank.find('e'), std::string::npos);
    EXPECT_EQ(blank[6], '\n');
}

TEST(Solprep, RandomizedPlacements) {
    int live = 0, hidden = 0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        const auto version = std::string(kVersionLadder[seed % kVersionLadder.size()]);
        const auto c = property::make_pragma_case(seed, version);
        const auto once = rewrite_pragma(c.source, version);
        ASSERT_EQ(once, c.expected) << "seed " << seed << "\n" << c.source;
        ASSERT_EQ(rewrite_pragma(once, version), once) << "seed " << seed;
        live += c.live_directives;
        hidden += c.hidden_directives;
    }
    EXPECT_GT(live, 500);
    EXPECT_GT(hidden, 500);
}

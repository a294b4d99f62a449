/*
 * Copyright 2026 The contract-triage Authors.
 * SPDX-License-Identifier: Apache-2.0
 */
#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <map>
#include <numeric>
#include <set>

#include "tokenizer_fixtures.hpp"
#include "triage/error.hpp"
#include "triage/features.hpp"

using namespace triage;

namespace {

ContractRecord rec(std::string source, std::vector<Severity> impacts = {}, bool malicious = false) {
    ContractRecord r;
    r.source = std::move(source);
    r.malicious = malicious;
    r.vulnerabilities = std::vector<std::string>(impacts.size(), "x");
    r.confidences = impacts;
    r.impacts = impacts;
    return r;
}

} // namespace

TEST(Tokenize, HandComputedFixtures) {
    for (const auto& c : fixtures::token_cases()) {
        EXPECT_EQ(tokenize(c.source), c.tokens) << c.source;
    }
}

TEST(Tokenize, FixtureCountsThroughVectorizer) {
    for (const auto& c : fixtures::token_cases()) {
        const auto r = rec(c.source);
        const auto vocab = build_vocabulary({r});
        ASSERT_EQ(vocab.size(), c.counts.size()) << c.source;
        const auto v = vectorize(r, vocab);
        for (std::size_t i = 0; i < c.counts.size(); ++i) {
            EXPECT_EQ(vocab.tokens()[i], c.counts[i].first);
            EXPECT_EQ(v.token_counts.at(i), c.counts[i].second) << c.source;
        }
    }
}

TEST(Tokenize, MixedCase) {
    EXPECT_EQ(tokenize("Msg.sender MSG_SENDER"), (std::vector<std::string>{"msg", "sender", "msg_sender"}));
}

TEST(Vocabulary, SortedDenseAndOrderIndependent) {
    const auto vocab = build_vocabulary({rec("aa bb"), rec("bb cc")});
    EXPECT_EQ(vocab.tokens(), (std::vector<std::string>{"aa", "bb", "cc"}));
    EXPECT_EQ(vocab.index_of("cc"), 2u);
    EXPECT_FALSE(vocab.index_of("dd"));
    EXPECT_EQ(build_vocabulary({}).size(), 0u);
    EXPECT_EQ(build_vocabulary({rec("bb cc"), rec("aa bb")}), vocab);
}

TEST(Vocabulary, PersistsOnePerLine) {
    const auto p = std::filesystem::temp_directory_path() / "triage-vocab.txt";
    const auto vocab = build_vocabulary({rec("zeta alpha mid_1")});
    vocab.save(p);
    EXPECT_EQ(Vocabulary::load(p), vocab);
}

TEST(Impact, Encoding) {
    EXPECT_EQ(encode_impact({Severity::Informational, Severity::Medium, Severity::High}),
              (ImpactFeatures{0, 1, 0, 1, 1, 4}));
    EXPECT_EQ(encode_impact({}), (ImpactFeatures{0, 0, 0, 0, 0, 0}));
    EXPECT_EQ(encode_impact({Severity::High, Severity::High}), (ImpactFeatures{0, 0, 0, 0, 2, 4}));
    EXPECT_EQ(encode_impact({Severity::Optimization}), (ImpactFeatures{1, 0, 0, 0, 0, 0}));
}

TEST(Vectorize, Examples) {
    const Vocabulary vocab({"aa", "bb", "cc"});
    const auto v = vectorize(rec("aa aa bb", {Severity::Low}, true), vocab);
    EXPECT_EQ(v.token_counts.dense(), (std::vector<std::uint32_t>{2, 1, 0}));
    EXPECT_EQ(v.impact_features, (ImpactFeatures{0, 0, 1, 0, 0, 2}));
    EXPECT_TRUE(v.label);
    EXPECT_EQ(v.dimension(), 9u);
    EXPECT_EQ(v.dense(), (std::vector<double>{2, 1, 0, 0, 0, 1, 0, 0, 2}));

    const auto unknown = vectorize(rec("zz yy"), vocab);
    EXPECT_EQ(unknown.token_counts.total(), 0u);

    ContractRecord null_record;
    null_record.source = "aa";
    try {
        vectorize(null_record, vocab);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::MissingAnalysis);
    }
}

TEST(Vectorize, CountSumEqualsInVocabTokens) {
    const Vocabulary vocab({"aa", "cc", "ee"});
    const std::string src = "aa bb cc aa dd ee ee ee f";
    const auto toks = tokenize(src);
    const auto in_vocab = std::count_if(toks.begin(), toks.end(), [&](const auto& t) { return vocab.index_of(t).has_value(); });
    EXPECT_EQ(vectorize(rec(src), vocab).token_counts.total(), static_cast<std::uint64_t>(in_vocab));
}

TEST(Split, Sizes) {
    EXPECT_EQ(train_size(2000, 0.6), 1200u);
    EXPECT_EQ(train_size(1, 0.6), 0u);
    EXPECT_EQ(train_size(10, 0.6), 6u);
    EXPECT_EQ(train_size(5, 0.6), 3u);
}

TEST(Split, PartitionAndDeterminism) {
    std::vector<int> items(2000);
    std::iota(items.begin(), items.end(), 0);
    const auto a = train_test_split(items, 0.6, 42);
    const auto b = train_test_split(items, 0.6, 42);
    const auto c = train_test_split(items, 0.6, 43);
    EXPECT_EQ(a.train.size(), 1200u);
    EXPECT_EQ(a.test.size(), 800u);
    EXPECT_EQ(a.train, b.train);
    EXPECT_EQ(a.test, b.test);
    EXPECT_NE(a.train, c.train);
    EXPECT_EQ(c.train.size(), 1200u);
    std::set<int> all(a.train.begin(), a.train.end());
    all.insert(a.test.begin(), a.test.end());
    EXPECT_EQ(all.size(), 2000u);

    const auto one = train_test_split(std::vector<int>{7}, 0.6, 1);
    EXPECT_TRUE(one.train.empty());
    EXPECT_EQ(one.test, std::vector<int>{7});
}

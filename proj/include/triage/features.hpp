/*
 * Copyright 2026 The contract-triage Authors.
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "triage/corpus.hpp"

namespace triage {

/// Lowercases, then returns maximal runs of [a-z0-9_] that are at least two
/// characters long, in order of occurrence.
std::vector<std::string> tokenize(std::string_view source);

/// Sorted token list; a token's index is its rank.
class Vocabulary {
public:
    Vocabulary() = default;
    /// Sorts and deduplicates.
    explicit Vocabulary(std::vector<std::string> tokens);

    std::optional<std::size_t> index_of(std::string_view token) const;
    std::size_t size() const noexcept { return tokens_.size(); }
    const std::vector<std::string>& tokens() const noexcept { return tokens_; }

    /// One token per line.
    void save(const std::filesystem::path& path) const;
    static Vocabulary load(const std::filesystem::path& path);

    friend bool operator==(const Vocabulary&, const Vocabulary&) = default;

private:
    std::vector<std::string> tokens_;
};

Vocabulary build_vocabulary(const Corpus& corpus);

inline constexpr std::size_t kImpactFeatures = 6;
using ImpactFeatures = std::array<std::uint32_t, kImpactFeatures>;

/// Counts per level (codes 0..4) followed by the highest level present, 0 if none.
ImpactFeatures encode_impact(const std::vector<Severity>& impacts);

/// Token counts stored sparsely as (index, count) pairs sorted by index.
struct SparseCounts {
    std::size_t dimension = 0;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> entries;

    std::uint32_t at(std::size_t index) const;
    std::vector<std::uint32_t> dense() const;
    std::uint64_t total() const;

    friend bool operator==(const SparseCounts&, const SparseCounts&) = default;
};

struct FeatureVector {
    SparseCounts token_counts;
    ImpactFeatures impact_features{};
    bool label = false;

    /// Token counts then impact features, as the classifier sees them.
    std::size_t dimension() const noexcept { return token_counts.dimension + kImpactFeatures; }
    double feature(std::size_t index) const;
    std::vector<double> dense() const;

    friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

/// Throws Error(MissingAnalysis) when the record has no impacts.
FeatureVector vectorize(const ContractRecord& record, const Vocabulary& vocab);

template <typename T>
struct Split {
    std::vector<T> train;
    std::vector<T> test;
};

/// Number of training rows: floor(n * train_fraction).
std::size_t train_size(std::size_t n, double train_fraction);

/// Seeded shuffle, then the first train_size(n) items train and the rest test.
/// Throws Error(InvalidArgument) unless 0 < train_fraction < 1.
template <typename T>
Split<T> train_test_split(const std::vector<T>& items, double train_fraction, std::uint64_t seed);

/// The permutation train_test_split applies; exposed so callers can split
/// parallel arrays identically.
std::vector<std::size_t> split_permutation(std::size_t n, std::uint64_t seed);

template <typename T>
Split<T> train_test_split(const std::vector<T>& items, double train_fraction, std::uint64_t seed) {
    const std::size_t n_train = train_size(items.size(), train_fraction);
    const auto order = split_permutation(items.size(), seed);
    Split<T> out;
    out.train.reserve(n_train);
    out.test.reserve(items.size() - n_train);
    for (std::size_t i = 0; i < order.size(); ++i) {
        (i < n_train ? out.train : out.test).push_back(items[order[i]]);
    }
    return out;
}

} // namespace triage

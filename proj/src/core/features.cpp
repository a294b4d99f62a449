/*
 * Copyright 2026 The contract-triage Authors.
 * SPDX-License-Identifier: Apache-2.0
 */
#include "triage/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>

#include "triage/error.hpp"
#include "triage/random.hpp"

namespace triage {

namespace {

bool is_token_char(char c) noexcept {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
}

char ascii_lower(char c) noexcept { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

template <typename Fn>
void for_each_token(std::string_view source, Fn&& fn) {
    std::string current;
    auto flush = [&] {
        if (current.size() >= 2) fn(current);
        current.clear();
    };
    for (char raw : source) {
        const char c = ascii_lower(raw);
        if (is_token_char(c)) current += c;
        else flush();
    }
    flush();
}

} // namespace

std::vector<std::string> tokenize(std::string_view source) {
    std::vector<std::string> tokens;
    for_each_token(source, [&](const std::string& t) { tokens.push_back(t); });
    return tokens;
}

Vocabulary::Vocabulary(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
    std::sort(tokens_.begin(), tokens_.end());
    tokens_.erase(std::unique(tokens_.begin(), tokens_.end()), tokens_.end());
}

std::optional<std::size_t> Vocabulary::index_of(std::string_view token) const {
    auto it = std::lower_bound(tokens_.begin(), tokens_.end(), token);
    if (it == tokens_.end() || *it != token) return std::nullopt;
    return static_cast<std::size_t>(it - tokens_.begin());
}

void Vocabulary::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    for (const auto& t : tokens_) out << t << '\n';
    if (!out.flush()) throw Error(ErrorCode::Io, "write failed: " + path.string());
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    std::vector<std::string> tokens;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) tokens.push_back(line);
    }
    return Vocabulary(std::move(tokens));
}

Vocabulary build_vocabulary(const Corpus& corpus) {
    std::set<std::string> tokens;
    for (const auto& r : corpus) {
        for_each_token(r.source, [&](const std::string& t) { tokens.insert(t); });
    }
    return Vocabulary(std::vector<std::string>(tokens.begin(), tokens.end()));
}

ImpactFeatures encode_impact(const std::vector<Severity>& impacts) {
    ImpactFeatures out{};
    for (Severity s : impacts) ++out[static_cast<std::size_t>(code(s))];
    for (std::size_t level = kSeverityLevels; level-- > 0;) {
        if (out[level] > 0) {
            out[kSeverityLevels] = static_cast<std::uint32_t>(level);
            break;
        }
    }
    return out;
}

std::uint32_t SparseCounts::at(std::size_t index) const {
    auto it = std::lower_bound(entries.begin(), entries.end(), index,
                               [](const auto& e, std::size_t i) { return e.first < i; });
    return (it != entries.end() && it->first == index) ? it->second : 0;
}

std::vector<std::uint32_t> SparseCounts::dense() const {
    std::vector<std::uint32_t> out(dimension, 0);
    for (const auto& [i, c] : entries) out[i] = c;
    return out;
}

std::uint64_t SparseCounts::total() const {
    return std::accumulate(entries.begin(), entries.end(), std::uint64_t{0},
                           [](std::uint64_t acc, const auto& e) { return acc + e.second; });
}

double FeatureVector::feature(std::size_t index) const {
    if (index < token_counts.dimension) return token_counts.at(index);
    return impact_features.at(index - token_counts.dimension);
}

std::vector<double> FeatureVector::dense() const {
    std::vector<double> out(dimension(), 0.0);
    for (const auto& [i, c] : token_counts.entries) out[i] = c;
    for (std::size_t k = 0; k < kImpactFeatures; ++k) out[token_counts.dimension + k] = impact_features[k];
    return out;
}

FeatureVector vectorize(const ContractRecord& record, const Vocabulary& vocab) {
    if (!record.impacts) throw Error(ErrorCode::MissingAnalysis, "MissingAnalysis: record has no impacts");
    std::map<std::uint32_t, std::uint32_t> counts;
    for_each_token(record.source, [&](const std::string& t) {
        if (auto i = vocab.index_of(t)) ++counts[static_cast<std::uint32_t>(*i)];
    });
    FeatureVector v;
    v.token_counts.dimension = vocab.size();
    v.token_counts.entries.assign(counts.begin(), counts.end());
    v.impact_features = encode_impact(*record.impacts);
    v.label = record.malicious;
    return v;
}

std::size_t train_size(std::size_t n, double train_fraction) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "train fraction must lie strictly between 0 and 1");
    }
    // The epsilon absorbs representation error (0.6 * 2000 must be 1200).
    return std::min(n, static_cast<std::size_t>(std::floor(static_cast<double>(n) * train_fraction + 1e-9)));
}

std::vector<std::size_t> split_permutation(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto rng = make_rng(seed, 0x5911);
    shuffle(order.begin(), order.end(), rng);
    return order;
}

} // namespace triage

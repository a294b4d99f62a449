/*
 * Copyright 2026 The contract-triage Authors.
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

// Brute-force greedy CART, written separately from the library's sweep.
// Every (feature, threshold) pair is tried by partitioning the samples and
// computing the size-weighted child Gini as an exact fraction.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <vector>

namespace oracle {

struct Sample {
    std::vector<float> x;
    bool y;
};

struct Node {
    int feature = -1;  // -1: leaf
    double threshold = 0.0;
    int negatives = 0;
    int positives = 0;
    bool label = false;
    std::vector<Node> children;  // [left, right] for splits
};

// a/b with b > 0
struct Frac {
    std::int64_t num;
    std::int64_t den;
};

inline bool less(const Frac& a, const Frac& b) { return a.num * b.den < b.num * a.den; }

// n * gini for a node with p positives of n.
inline Frac weighted_gini(std::int64_t p, std::int64_t n) {
    const std::int64_t q = n - p;
    return {n * n - p * p - q * q, n};
}

inline Frac add(const Frac& a, const Frac& b) { return {a.num * b.den + b.num * a.den, a.den * b.den}; }

inline Node grow(const std::vector<Sample>& samples, int depth = 0, std::optional<int> max_depth = {},
                 int min_samples_split = 2) {
    Node node;
    for (const auto& s : samples) (s.y ? node.positives : node.negatives)++;
    node.label = node.positives >= node.negatives;
    const int n = static_cast<int>(samples.size());
    if (node.positives == 0 || node.negatives == 0) return node;
    if (max_depth && depth >= *max_depth) return node;
    if (n < min_samples_split) return node;

    const std::size_t d = samples.front().x.size();
    std::optional<Frac> best;
    int best_feature = -1;
    double best_threshold = 0.0;
    for (std::size_t f = 0; f < d; ++f) {
        std::set<float> distinct;
        for (const auto& s : samples) distinct.insert(s.x[f]);
        std::vector<float> values(distinct.begin(), distinct.end());
        for (std::size_t k = 0; k + 1 < values.size(); ++k) {
            const double t = (static_cast<double>(values[k]) + static_cast<double>(values[k + 1])) / 2.0;
            std::int64_t nl = 0, pl = 0, nr = 0, pr = 0;
            for (const auto& s : samples) {
                if (s.x[f] <= t) {
                    ++nl;
                    pl += s.y;
                } else {
                    ++nr;
                    pr += s.y;
                }
            }
            const Frac impurity = add(weighted_gini(pl, nl), weighted_gini(pr, nr));
            if (!best || less(impurity, *best)) {
                best = impurity;
                best_feature = static_cast<int>(f);
                best_threshold = t;
            }
        }
    }
    if (!best || !less(*best, weighted_gini(node.positives, n))) return node;

    std::vector<Sample> left, right;
    for (const auto& s : samples) (s.x[best_feature] <= best_threshold ? left : right).push_back(s);
    node.feature = best_feature;
    node.threshold = best_threshold;
    node.children.push_back(grow(left, depth + 1, max_depth, min_samples_split));
    node.children.push_back(grow(right, depth + 1, max_depth, min_samples_split));
    return node;
}

// Pre-order, left subtree first.
inline void flatten(const Node& node, std::vector<const Node*>& out) {
    out.push_back(&node);
    for (const auto& c : node.children) flatten(c, out);
}

} // namespace oracle

/*
 * Copyright 2026 The contract-triage Authors.
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "cart_oracle.hpp"
#include "triage/forest.hpp"

namespace oracle {

struct FamilyResult {
    std::size_t datasets = 0;
    std::size_t agreed = 0;
    std::string first_mismatch;
};

inline bool tree_matches(const std::vector<Sample>& samples, std::string* why = nullptr) {
    const std::size_t n = samples.size(), d = samples.front().x.size();
    std::vector<std::vector<double>> rows;
    std::vector<bool> labels;
    for (const auto& s : samples) {
        rows.emplace_back(s.x.begin(), s.x.end());
        labels.push_back(s.y);
    }
    const auto data = triage::TrainingSet::from_dense(rows, labels);
    triage::ForestParams params;
    params.n_trees = 1;
    params.mtry = static_cast<std::uint32_t>(d);
    params.bootstrap = false;
    const auto model = triage::train_forest(data, params);
    const auto& nodes = model.trees().at(0).nodes();

    const Node root = grow(samples);
    std::vector<const Node*> expected;
    flatten(root, expected);
    auto fail = [&](const std::string& msg) {
        if (why) *why = msg + " (n=" + std::to_string(n) + ", d=" + std::to_string(d) + ")";
        return false;
    };
    if (expected.size() != nodes.size()) return fail("node count differs");
    // Map oracle pre-order positions to indices and compare structure.
    std::vector<std::size_t> position(expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
        const auto& e = *expected[i];
        const auto& got = nodes[i];
        if (e.feature != got.feature) return fail("feature differs at node " + std::to_string(i));
        if (e.positives != static_cast<int>(got.positives) || e.negatives != static_cast<int>(got.negatives)) {
            return fail("class counts differ at node " + std::to_string(i));
        }
        if (e.label != got.label) return fail("label differs at node " + std::to_string(i));
        if (e.feature >= 0) {
            if (e.threshold != got.threshold) return fail("threshold differs at node " + std::to_string(i));
            const std::size_t left = i + 1;
            std::vector<const Node*> left_subtree;
            flatten(e.children[0], left_subtree);
            const std::size_t right = left + left_subtree.size();
            if (got.left != left || got.right != right) return fail("child links differ at node " + std::to_string(i));
        }
    }
    return true;
}

inline void check(FamilyResult& r, const std::vector<Sample>& samples) {
    ++r.datasets;
    std::string why;
    if (tree_matches(samples, &why)) {
        ++r.agreed;
    } else if (r.first_mismatch.empty()) {
        r.first_mismatch = why;
    }
}

// Every dataset with n <= 4 samples, d <= 2 features, values in {0, 1, 2};
// every single-feature dataset of 5 samples; then seeded draws up to 8 x 3.
inline FamilyResult run_family(std::size_t random_draws = 20000) {
    FamilyResult r;
    for (std::size_t d = 1; d <= 2; ++d) {
        for (std::size_t n = 1; n <= 4; ++n) {
            const std::size_t per_sample = static_cast<std::size_t>(std::pow(3, d)) * 2;
            std::size_t total = 1;
            for (std::size_t i = 0; i < n; ++i) total *= per_sample;
            for (std::size_t code = 0; code < total; ++code) {
                std::vector<Sample> samples(n);
                std::size_t c = code;
                for (auto& s : samples) {
                    std::size_t cell = c % per_sample;
                    c /= per_sample;
                    s.y = cell % 2;
                    cell /= 2;
                    for (std::size_t f = 0; f < d; ++f) {
                        s.x.push_back(static_cast<float>(cell % 3));
                        cell /= 3;
                    }
                }
                check(r, samples);
            }
        }
    }
    for (std::size_t code = 0; code < 7776; ++code) {  // (3 values * 2 labels)^5
        std::vector<Sample> samples(5);
        std::size_t c = code;
        for (auto& s : samples) {
            s.y = c % 2;
            c /= 2;
            s.x = {static_cast<float>(c % 3)};
            c /= 3;
        }
        check(r, samples);
    }
    std::mt19937_64 rng(2024);
    const float values[] = {0.0f, 0.5f, 1.0f, 2.0f, 3.0f, 0.1f};
    for (std::size_t k = 0; k < random_draws; ++k) {
        const std::size_t n = 1 + rng() % 8, d = 1 + rng() % 3;
        const bool binary = rng() % 2;
        std::vector<Sample> samples(n);
        for (auto& s : samples) {
            s.y = rng() % 2;
            for (std::size_t f = 0; f < d; ++f) {
                s.x.push_back(binary ? static_cast<float>(rng() % 2) : values[rng() % std::size(values)]);
            }
        }
        check(r, samples);
    }
    return r;
}

// Every multiset of 1..max_n samples over `features` binary features and
// both labels. Row order does not affect growth, so multisets cover all datasets.
inline FamilyResult run_binary_family(std::size_t max_n = 8, std::size_t features = 3) {
    FamilyResult r;
    const std::size_t cells = (std::size_t{1} << features) * 2;
    for (std::size_t n = 1; n <= max_n; ++n) {
        std::vector<std::size_t> pick(n, 0);  // non-decreasing cell indices
        for (;;) {
            std::vector<Sample> samples(n);
            for (std::size_t i = 0; i < n; ++i) {
                samples[i].y = pick[i] % 2;
                for (std::size_t f = 0; f < features; ++f) {
                    samples[i].x.push_back(static_cast<float>((pick[i] >> (f + 1)) & 1));
                }
            }
            check(r, samples);
            std::size_t k = n;
            while (k > 0 && pick[k - 1] == cells - 1) --k;
            if (k == 0) break;
            const std::size_t next = pick[k - 1] + 1;
            for (std::size_t i = k - 1; i < n; ++i) pick[i] = next;
        }
    }
    return r;
}

} // namespace oracle

/*
 * Copyright 2026 The contract-triage Authors.
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "triage/features.hpp"
#include "triage/random.hpp"

namespace triage {

/// Column-major feature matrix with boolean labels.
class TrainingSet {
public:
    TrainingSet(std::size_t rows, std::size_t cols);
    static TrainingSet from_vectors(const std::vector<FeatureVector>& vectors);
    static TrainingSet from_dense(const std::vector<std::vector<double>>& rows,
                                  const std::vector<bool>& labels);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    float value(std::size_t row, std::size_t col) const noexcept { return values_[col * rows_ + row]; }
    void set(std::size_t row, std::size_t col, float v) noexcept { values_[col * rows_ + row] = v; }
    bool label(std::size_t row) const noexcept { return labels_[row] != 0; }
    void set_label(std::size_t row, bool v) noexcept { labels_[row] = v ? 1 : 0; }

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<float> values_;
    std::vector<std::uint8_t> labels_;
};

struct ForestParams {
    std::uint32_t n_trees = 100;
    std::optional<std::uint32_t> max_depth;  // unlimited when empty
    std::uint32_t min_samples_split = 2;
    std::optional<std::uint32_t> mtry;       // floor(sqrt(features)) when empty
    std::uint64_t seed = 0;
    /// Draw each tree's rows with replacement. Turning this off (with one tree
    /// and mtry = all features) yields plain greedy CART.
    bool bootstrap = true;
    unsigned jobs = 1;

    std::uint32_t resolved_mtry(std::size_t features) const;

    friend bool operator==(const ForestParams&, const ForestParams&) = default;
};

/// 1 - p1^2 - p0^2. Throws Error(EmptyNode) for an empty node.
double gini_impurity(const std::vector<bool>& labels);
double gini_impurity(std::size_t positives, std::size_t total);

struct SplitChoice {
    std::uint32_t feature;
    double threshold;
    friend bool operator==(const SplitChoice&, const SplitChoice&) = default;
};

/// Exhaustive search over `features` and midpoints between consecutive
/// distinct values, minimizing size-weighted child Gini. Ties go to the lowest
/// feature index, then the lowest threshold. nullopt when no split lowers the
/// impurity. `rows` may contain repeats (bootstrap draws).
std::optional<SplitChoice> best_split(const TrainingSet& data, std::span<const std::uint32_t> rows,
                                      std::span<const std::uint32_t> features);

/// Flat node; a node is a leaf when feature < 0. Samples with
/// value <= threshold go left.
struct TreeNode {
    std::int32_t feature = -1;
    double threshold = 0.0;
    std::uint32_t left = 0;
    std::uint32_t right = 0;
    std::uint32_t negatives = 0;
    std::uint32_t positives = 0;
    bool label = false;

    bool is_leaf() const noexcept { return feature < 0; }
    friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

class DecisionTree {
public:
    DecisionTree() = default;
    explicit DecisionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

    template <typename FeatureAt>
    bool predict_with(FeatureAt&& feature_at) const {
        std::uint32_t i = 0;
        while (!nodes_[i].is_leaf()) {
            const auto& n = nodes_[i];
            const float v = static_cast<float>(feature_at(static_cast<std::size_t>(n.feature)));
            i = v <= n.threshold ? n.left : n.right;
        }
        return nodes_[i].label;
    }

    const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
    std::size_t depth() const;
    friend bool operator==(const DecisionTree&, const DecisionTree&) = default;

private:
    std::vector<TreeNode> nodes_;
};

/// Grows one CART tree on `rows` (indices into data, repeats allowed).
DecisionTree grow_tree(const TrainingSet& data, std::vector<std::uint32_t> rows,
                       const ForestParams& params, Rng& rng);

class ForestModel {
public:
    ForestModel() = default;
    ForestModel(ForestParams params, std::size_t features, std::vector<DecisionTree> trees);

    /// Majority vote; an exact tie predicts true.
    bool predict(std::span<const double> x) const;
    bool predict(const FeatureVector& x) const;
    std::vector<bool> predict_all(const std::vector<FeatureVector>& xs, unsigned jobs = 1) const;
    /// Number of trees voting true.
    std::size_t votes(const FeatureVector& x) const;

    const ForestParams& params() const noexcept { return params_; }
    std::size_t features() const noexcept { return features_; }
    const std::vector<DecisionTree>& trees() const noexcept { return trees_; }

    void write(std::ostream& out) const;
    static ForestModel read(std::istream& in);

    friend bool operator==(const ForestModel&, const ForestModel&) = default;

private:
    ForestParams params_;
    std::size_t features_ = 0;
    std::vector<DecisionTree> trees_;
};

/// Tree t is grown from an RNG seeded by (params.seed, t), so the model does
/// not depend on params.jobs. Throws Error(DimensionMismatch) or
/// Error(InvalidArgument) on bad input.
ForestModel train_forest(const TrainingSet& data, const ForestParams& params);
ForestModel train_forest(const std::vector<FeatureVector>& train, const ForestParams& params);

/// Forest plus the vocabulary it was trained against; what the CLI persists.
struct TriageModel {
    Vocabulary vocabulary;
    ForestModel forest;

    bool classify(const ContractRecord& record) const;
    void save(const std::filesystem::path& path) const;
    static TriageModel load(const std::filesystem::path& path);

    friend bool operator==(const TriageModel&, const TriageModel&) = default;
};

struct Metrics {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t tn = 0;
    std::uint64_t fn = 0;
    double accuracy = 0.0;
    double f1 = 0.0;
    double false_positive_rate = 0.0;

    std::uint64_t total() const noexcept { return tp + fp + tn + fn; }
};

/// Confusion counts and derived scores. F1 and FPR are 0 when their
/// denominators are 0. Throws Error(LengthMismatch) or Error(InvalidArgument)
/// for empty input.
Metrics evaluate_metrics(const std::vector<bool>& predictions, const std::vector<bool>& truths);
Metrics metrics_from_counts(std::uint64_t tp, std::uint64_t fp, std::uint64_t tn, std::uint64_t fn);

} // namespace triage

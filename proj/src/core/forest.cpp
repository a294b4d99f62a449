/*
 * Copyright 2026 The contract-triage Authors.
 * SPDX-License-Identifier: Apache-2.0
 */
#include "triage/forest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "triage/error.hpp"
#include "triage/parallel.hpp"

namespace triage {

// ---------------------------------------------------------------------------
// TrainingSet

TrainingSet::TrainingSet(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), values_(rows * cols, 0.0f), labels_(rows, 0) {}

TrainingSet TrainingSet::from_vectors(const std::vector<FeatureVector>& vectors) {
    if (vectors.empty()) throw Error(ErrorCode::InvalidArgument, "training set is empty");
    const std::size_t dim = vectors.front().dimension();
    TrainingSet set(vectors.size(), dim);
    for (std::size_t r = 0; r < vectors.size(); ++r) {
        const auto& v = vectors[r];
        if (v.dimension() != dim) {
            throw Error(ErrorCode::DimensionMismatch, "DimensionMismatch: row " + std::to_string(r) + " has " +
                                                          std::to_string(v.dimension()) + " features, expected " +
                                                          std::to_string(dim));
        }
        for (const auto& [i, c] : v.token_counts.entries) set.set(r, i, static_cast<float>(c));
        for (std::size_t k = 0; k < kImpactFeatures; ++k) {
            set.set(r, v.token_counts.dimension + k, static_cast<float>(v.impact_features[k]));
        }
        set.set_label(r, v.label);
    }
    return set;
}

TrainingSet TrainingSet::from_dense(const std::vector<std::vector<double>>& rows, const std::vector<bool>& labels) {
    if (rows.empty()) throw Error(ErrorCode::InvalidArgument, "training set is empty");
    if (rows.size() != labels.size()) throw Error(ErrorCode::LengthMismatch, "rows and labels differ in length");
    const std::size_t dim = rows.front().size();
    TrainingSet set(rows.size(), dim);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != dim) {
            throw Error(ErrorCode::DimensionMismatch, "DimensionMismatch at row " + std::to_string(r));
        }
        for (std::size_t c = 0; c < dim; ++c) set.set(r, c, static_cast<float>(rows[r][c]));
        set.set_label(r, labels[r]);
    }
    return set;
}

// ---------------------------------------------------------------------------
// Split search

std::uint32_t ForestParams::resolved_mtry(std::size_t features) const {
    if (features == 0) throw Error(ErrorCode::InvalidArgument, "no features");
    const auto m = mtry ? *mtry
                        : static_cast<std::uint32_t>(std::floor(std::sqrt(static_cast<double>(features))));
    if (m < 1 || m > features) {
        throw Error(ErrorCode::InvalidArgument, "mtry must lie in [1, " + std::to_string(features) + "]");
    }
    return m;
}

double gini_impurity(std::size_t positives, std::size_t total) {
    if (total == 0) throw Error(ErrorCode::EmptyNode, "EmptyNode: gini of an empty node");
    if (positives > total) throw Error(ErrorCode::InvalidArgument, "more positives than samples");
    const double p1 = static_cast<double>(positives) / static_cast<double>(total);
    const double p0 = 1.0 - p1;
    return 1.0 - p1 * p1 - p0 * p0;
}

double gini_impurity(const std::vector<bool>& labels) {
    return gini_impurity(static_cast<std::size_t>(std::count(labels.begin(), labels.end(), true)), labels.size());
}

namespace {

using Wide = unsigned __int128;

// Size-weighted child Gini is n - S, where
//   S = (pl^2 + ql^2) / nl + (pr^2 + qr^2) / nr.
// Minimizing impurity means maximizing S, kept as an exact fraction.
struct Score {
    Wide num = 0;
    Wide den = 1;

    bool better_than(const Score& o) const { return num * o.den > o.num * den; }
};

Score split_score(std::uint64_t pl, std::uint64_t nl, std::uint64_t pr, std::uint64_t nr) {
    const std::uint64_t ql = nl - pl, qr = nr - pr;
    const Wide left = Wide(pl) * pl + Wide(ql) * ql;
    const Wide right = Wide(pr) * pr + Wide(qr) * qr;
    return {left * nr + right * nl, Wide(nl) * nr};
}

} // namespace

std::optional<SplitChoice> best_split(const TrainingSet& data, std::span<const std::uint32_t> rows,
                                      std::span<const std::uint32_t> features) {
    if (rows.empty()) throw Error(ErrorCode::EmptyNode, "EmptyNode: best_split on no samples");
    const std::uint64_t n = rows.size();
    std::uint64_t positives = 0;
    for (auto r : rows) positives += data.label(r) ? 1 : 0;
    if (positives == 0 || positives == n) return std::nullopt;

    std::vector<std::uint32_t> order(features.begin(), features.end());
    std::sort(order.begin(), order.end());

    std::optional<SplitChoice> best;
    Score best_score;
    std::vector<std::pair<float, bool>> column(rows.size());
    for (auto f : order) {
        if (f >= data.cols()) throw Error(ErrorCode::DimensionMismatch, "feature index out of range");
        for (std::size_t i = 0; i < rows.size(); ++i) column[i] = {data.value(rows[i], f), data.label(rows[i])};
        std::sort(column.begin(), column.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        if (column.front().first == column.back().first) continue;

        std::uint64_t pl = 0;
        for (std::size_t i = 0; i + 1 < column.size(); ++i) {
            pl += column[i].second ? 1 : 0;
            if (column[i].first == column[i + 1].first) continue;
            const std::uint64_t nl = i + 1;
            const Score s = split_score(pl, nl, positives - pl, n - nl);
            if (!best || s.better_than(best_score)) {
                best_score = s;
                best = SplitChoice{f, (static_cast<double>(column[i].first) + column[i + 1].first) / 2.0};
            }
        }
    }
    if (!best) return std::nullopt;
    // Must beat the parent: S > (P^2 + Q^2) / n.
    const std::uint64_t negatives = n - positives;
    const Score parent{Wide(positives) * positives + Wide(negatives) * negatives, n};
    if (!best_score.better_than(parent)) return std::nullopt;
    return best;
}

// ---------------------------------------------------------------------------
// Tree growth

std::size_t DecisionTree::depth() const {
    if (nodes_.empty()) return 0;
    std::vector<std::pair<std::uint32_t, std::size_t>> stack{{0, 0}};
    std::size_t deepest = 0;
    while (!stack.empty()) {
        auto [i, d] = stack.back();
        stack.pop_back();
        deepest = std::max(deepest, d);
        if (!nodes_[i].is_leaf()) {
            stack.push_back({nodes_[i].left, d + 1});
            stack.push_back({nodes_[i].right, d + 1});
        }
    }
    return deepest;
}

namespace {

class TreeBuilder {
public:
    TreeBuilder(const TrainingSet& data, const ForestParams& params, Rng& rng)
        : data_(data), params_(params), rng_(rng), mtry_(params.resolved_mtry(data.cols())),
          feature_pool_(data.cols()) {
        std::iota(feature_pool_.begin(), feature_pool_.end(), 0u);
    }

    std::vector<TreeNode> build(std::vector<std::uint32_t> rows) {
        grow(std::move(rows), 0);
        return std::move(nodes_);
    }

private:
    std::vector<std::uint32_t> draw_features() {
        const std::size_t d = feature_pool_.size();
        if (mtry_ >= d) return feature_pool_;
        for (std::size_t k = 0; k < mtry_; ++k) {
            const auto j = k + uniform_below(rng_, d - k);
            std::swap(feature_pool_[k], feature_pool_[j]);
        }
        std::vector<std::uint32_t> subset(feature_pool_.begin(), feature_pool_.begin() + mtry_);
        std::sort(subset.begin(), subset.end());
        return subset;
    }

    std::uint32_t grow(std::vector<std::uint32_t> rows, std::uint32_t depth) {
        const auto index = static_cast<std::uint32_t>(nodes_.size());
        nodes_.emplace_back();
        std::uint32_t positives = 0;
        for (auto r : rows) positives += data_.label(r) ? 1 : 0;
        const auto total = static_cast<std::uint32_t>(rows.size());
        {
            auto& node = nodes_[index];
            node.positives = positives;
            node.negatives = total - positives;
            node.label = positives >= total - positives;
        }

        const bool pure = positives == 0 || positives == total;
        const bool depth_capped = params_.max_depth && depth >= *params_.max_depth;
        if (pure || depth_capped || total < params_.min_samples_split) return index;

        const auto subset = draw_features();
        const auto split = best_split(data_, rows, subset);
        if (!split) return index;

        std::vector<std::uint32_t> left, right;
        for (auto r : rows) {
            (data_.value(r, split->feature) <= split->threshold ? left : right).push_back(r);
        }
        rows.clear();
        rows.shrink_to_fit();
        const auto l = grow(std::move(left), depth + 1);
        const auto rt = grow(std::move(right), depth + 1);
        auto& node = nodes_[index];
        node.feature = static_cast<std::int32_t>(split->feature);
        node.threshold = split->threshold;
        node.left = l;
        node.right = rt;
        return index;
    }

    const TrainingSet& data_;
    const ForestParams& params_;
    Rng& rng_;
    std::uint32_t mtry_;
    std::vector<std::uint32_t> feature_pool_;
    std::vector<TreeNode> nodes_;
};

} // namespace

DecisionTree grow_tree(const TrainingSet& data, std::vector<std::uint32_t> rows, const ForestParams& params,
                       Rng& rng) {
    if (rows.empty()) throw Error(ErrorCode::EmptyNode, "EmptyNode: cannot grow a tree on no samples");
    return DecisionTree(TreeBuilder(data, params, rng).build(std::move(rows)));
}

// ---------------------------------------------------------------------------
// Forest

ForestModel::ForestModel(ForestParams params, std::size_t features, std::vector<DecisionTree> trees)
    : params_(params), features_(features), trees_(std::move(trees)) {}

ForestModel train_forest(const TrainingSet& data, const ForestParams& params) {
    if (data.rows() == 0) throw Error(ErrorCode::InvalidArgument, "training set is empty");
    if (params.n_trees < 1) throw Error(ErrorCode::InvalidArgument, "n_trees must be at least 1");
    (void)params.resolved_mtry(data.cols());

    std::vector<DecisionTree> trees(params.n_trees);
    parallel_for(params.n_trees, params.jobs, [&](std::size_t t) {
        auto rng = make_rng(params.seed, t);
        std::vector<std::uint32_t> rows(data.rows());
        if (params.bootstrap) {
            for (auto& r : rows) r = static_cast<std::uint32_t>(uniform_below(rng, data.rows()));
        } else {
            std::iota(rows.begin(), rows.end(), 0u);
        }
        trees[t] = grow_tree(data, std::move(rows), params, rng);
    });
    return ForestModel(params, data.cols(), std::move(trees));
}

ForestModel train_forest(const std::vector<FeatureVector>& train, const ForestParams& params) {
    return train_forest(TrainingSet::from_vectors(train), params);
}

bool ForestModel::predict(std::span<const double> x) const {
    if (x.size() != features_) {
        throw Error(ErrorCode::DimensionMismatch, "DimensionMismatch: got " + std::to_string(x.size()) +
                                                      " features, model expects " + std::to_string(features_));
    }
    std::size_t yes = 0;
    for (const auto& tree : trees_) yes += tree.predict_with([&](std::size_t i) { return x[i]; }) ? 1 : 0;
    return 2 * yes >= trees_.size();
}

std::size_t ForestModel::votes(const FeatureVector& x) const {
    if (x.dimension() != features_) {
        throw Error(ErrorCode::DimensionMismatch, "DimensionMismatch: got " + std::to_string(x.dimension()) +
                                                      " features, model expects " + std::to_string(features_));
    }
    std::size_t yes = 0;
    for (const auto& tree : trees_) yes += tree.predict_with([&](std::size_t i) { return x.feature(i); }) ? 1 : 0;
    return yes;
}

bool ForestModel::predict(const FeatureVector& x) const { return 2 * votes(x) >= trees_.size(); }

std::vector<bool> ForestModel::predict_all(const std::vector<FeatureVector>& xs, unsigned jobs) const {
    std::vector<char> out(xs.size(), 0);
    parallel_for(xs.size(), jobs, [&](std::size_t i) { out[i] = predict(xs[i]) ? 1 : 0; });
    return {out.begin(), out.end()};
}

// ---------------------------------------------------------------------------
// Persistence (format described in docs/model-format.md)

namespace {

constexpr std::string_view kForestMagic = "contract-triage-forest";
constexpr std::string_view kModelMagic = "contract-triage-model";
constexpr int kFormatVersion = 1;

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
    double v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw Error(ErrorCode::Parse, "bad number '" + s + "' in model file");
    }
    return v;
}

std::string optional_u32(const std::optional<std::uint32_t>& v) { return v ? std::to_string(*v) : "-"; }

std::optional<std::uint32_t> parse_optional_u32(const std::string& s) {
    if (s == "-") return std::nullopt;
    return static_cast<std::uint32_t>(std::stoul(s));
}

void expect(std::istream& in, std::string_view word) {
    std::string got;
    if (!(in >> got) || got != word) {
        throw Error(ErrorCode::Parse, "model file: expected '" + std::string(word) + "', got '" + got + "'");
    }
}

template <typename T>
T read_value(std::istream& in, const char* what) {
    T v{};
    if (!(in >> v)) throw Error(ErrorCode::Parse, std::string("model file: cannot read ") + what);
    return v;
}

} // namespace

void ForestModel::write(std::ostream& out) const {
    out << kForestMagic << ' ' << kFormatVersion << '\n';
    out << "features " << features_ << '\n';
    out << "params " << params_.n_trees << ' ' << optional_u32(params_.max_depth) << ' '
        << params_.min_samples_split << ' ' << optional_u32(params_.mtry) << ' ' << params_.seed << ' '
        << (params_.bootstrap ? 1 : 0) << '\n';
    for (const auto& tree : trees_) {
        out << "tree " << tree.nodes().size() << '\n';
        for (const auto& n : tree.nodes()) {
            if (n.is_leaf()) {
                out << "L " << n.negatives << ' ' << n.positives << ' ' << (n.label ? 1 : 0) << '\n';
            } else {
                out << "S " << n.feature << ' ' << format_double(n.threshold) << ' ' << n.left << ' ' << n.right
                    << ' ' << n.negatives << ' ' << n.positives << ' ' << (n.label ? 1 : 0) << '\n';
            }
        }
    }
    out << "end\n";
}

ForestModel ForestModel::read(std::istream& in) {
    try {
        expect(in, kForestMagic);
        const int version = read_value<int>(in, "version");
        if (version != kFormatVersion) {
            throw Error(ErrorCode::Parse, "unsupported forest format version " + std::to_string(version));
        }
        expect(in, "features");
        const auto features = read_value<std::size_t>(in, "feature count");
        expect(in, "params");
        ForestParams params;
        params.n_trees = read_value<std::uint32_t>(in, "n_trees");
        params.max_depth = parse_optional_u32(read_value<std::string>(in, "max_depth"));
        params.min_samples_split = read_value<std::uint32_t>(in, "min_samples_split");
        params.mtry = parse_optional_u32(read_value<std::string>(in, "mtry"));
        params.seed = read_value<std::uint64_t>(in, "seed");
        params.bootstrap = read_value<int>(in, "bootstrap") != 0;

        std::vector<DecisionTree> trees;
        for (;;) {
            const auto tag = read_value<std::string>(in, "tree tag");
            if (tag == "end") break;
            if (tag != "tree") throw Error(ErrorCode::Parse, "model file: expected 'tree', got '" + tag + "'");
            const auto count = read_value<std::size_t>(in, "node count");
            std::vector<TreeNode> nodes(count);
            for (std::size_t i = 0; i < count; ++i) {
                auto& n = nodes[i];
                const auto kind = read_value<std::string>(in, "node kind");
                if (kind == "S") {
                    n.feature = read_value<std::int32_t>(in, "feature");
                    n.threshold = parse_double(read_value<std::string>(in, "threshold"));
                    n.left = read_value<std::uint32_t>(in, "left");
                    n.right = read_value<std::uint32_t>(in, "right");
                    if (n.feature < 0 || static_cast<std::size_t>(n.feature) >= features || n.left >= count ||
                        n.right >= count || n.left <= i || n.right <= i) {
                        throw Error(ErrorCode::Parse, "model file: split node " + std::to_string(i) + " is invalid");
                    }
                } else if (kind != "L") {
                    throw Error(ErrorCode::Parse, "model file: unknown node kind '" + kind + "'");
                }
                n.negatives = read_value<std::uint32_t>(in, "negatives");
                n.positives = read_value<std::uint32_t>(in, "positives");
                n.label = read_value<int>(in, "label") != 0;
            }
            if (nodes.empty()) throw Error(ErrorCode::Parse, "model file: empty tree");
            trees.emplace_back(std::move(nodes));
        }
        if (trees.size() != params.n_trees) {
            throw Error(ErrorCode::Parse, "model file: tree count does not match params");
        }
        return ForestModel(params, features, std::move(trees));
    } catch (const std::invalid_argument&) {
        throw Error(ErrorCode::Parse, "model file: malformed number");
    } catch (const std::out_of_range&) {
        throw Error(ErrorCode::Parse, "model file: number out of range");
    }
}

bool TriageModel::classify(const ContractRecord& record) const {
    return forest.predict(vectorize(record, vocabulary));
}

void TriageModel::save(const std::filesystem::path& path) const {
    std::ostringstream out;
    out << kModelMagic << ' ' << kFormatVersion << '\n';
    out << "vocabulary " << vocabulary.size() << '\n';
    for (const auto& t : vocabulary.tokens()) out << t << '\n';
    forest.write(out);
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw Error(ErrorCode::Io, "cannot write " + path.string());
    file << out.str();
    if (!file.flush()) throw Error(ErrorCode::Io, "write failed: " + path.string());
}

TriageModel TriageModel::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    expect(in, kModelMagic);
    if (read_value<int>(in, "version") != kFormatVersion) {
        throw Error(ErrorCode::Parse, "unsupported model format version");
    }
    expect(in, "vocabulary");
    const auto size = read_value<std::size_t>(in, "vocabulary size");
    std::vector<std::string> tokens(size);
    for (auto& t : tokens) t = read_value<std::string>(in, "token");
    TriageModel model{Vocabulary(std::move(tokens)), ForestModel::read(in)};
    if (model.vocabulary.size() != size) throw Error(ErrorCode::Parse, "model file: duplicate vocabulary tokens");
    if (model.forest.features() != size + kImpactFeatures) {
        throw Error(ErrorCode::Parse, "model file: feature count does not match vocabulary");
    }
    return model;
}

// ---------------------------------------------------------------------------
// Metrics

Metrics metrics_from_counts(std::uint64_t tp, std::uint64_t fp, std::uint64_t tn, std::uint64_t fn) {
    Metrics m{tp, fp, tn, fn, 0.0, 0.0, 0.0};
    const auto total = m.total();
    if (total == 0) throw Error(ErrorCode::InvalidArgument, "metrics need at least one prediction");
    m.accuracy = static_cast<double>(tp + tn) / static_cast<double>(total);
    const auto f1_den = 2 * tp + fp + fn;
    m.f1 = f1_den == 0 ? 0.0 : static_cast<double>(2 * tp) / static_cast<double>(f1_den);
    m.false_positive_rate = (fp + tn) == 0 ? 0.0 : static_cast<double>(fp) / static_cast<double>(fp + tn);
    return m;
}

Metrics evaluate_metrics(const std::vector<bool>& predictions, const std::vector<bool>& truths) {
    if (predictions.size() != truths.size()) {
        throw Error(ErrorCode::LengthMismatch, "LengthMismatch: " + std::to_string(predictions.size()) +
                                                   " predictions vs " + std::to_string(truths.size()) + " truths");
    }
    if (predictions.empty()) throw Error(ErrorCode::LengthMismatch, "LengthMismatch: no predictions to score");
    std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        if (predictions[i]) (truths[i] ? tp : fp)++;
        else (truths[i] ? fn : tn)++;
    }
    return metrics_from_counts(tp, fp, tn, fn);
}

} // namespace triage

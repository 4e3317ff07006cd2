/*
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    https://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/
#include "greenretrain/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "greenretrain/errors.hpp"

namespace greenretrain {

void validate(const ForestHyperparams& hp, std::size_t n_features) {
    require(hp.n_trees >= 1, ErrorKind::kConfiguration, "n_trees must be >= 1");
    require(hp.min_samples_leaf >= 1, ErrorKind::kConfiguration, "min_samples_leaf must be >= 1");
    require(hp.bootstrap_fraction > 0.0 && hp.bootstrap_fraction <= 1.0, ErrorKind::kConfiguration,
            "bootstrap_fraction must lie in (0, 1]");
    require(hp.max_features >= 1 && hp.max_features <= n_features, ErrorKind::kConfiguration,
            "max_features must lie in [1, " + std::to_string(n_features) + "]");
    require(!hp.max_depth || *hp.max_depth >= 1, ErrorKind::kConfiguration, "max_depth must be >= 1");
}

DecisionTree::DecisionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {
    require(!nodes_.empty(), ErrorKind::kSchema, "a tree needs at least a root node");
    const auto n = static_cast<std::int32_t>(nodes_.size());
    for (const auto& node : nodes_) {
        if (node.is_leaf()) continue;
        require(node.left > 0 && node.left < n && node.right > 0 && node.right < n, ErrorKind::kSchema,
                "tree child index out of range");
    }
}

double DecisionTree::predict(std::span<const double> row) const {
    std::size_t i = 0;
    while (!nodes_[i].is_leaf()) {
        const auto& node = nodes_[i];
        i = static_cast<std::size_t>(row[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left
                                                                                                    : node.right);
    }
    return nodes_[i].value;
}

TrainedForest::TrainedForest(std::vector<DecisionTree> trees, ForestHyperparams hyperparams,
                             std::vector<double> importances, std::size_t train_size)
    : trees_(std::move(trees)),
      hyperparams_(hyperparams),
      importances_(std::move(importances)),
      train_size_(train_size) {
    require(!trees_.empty(), ErrorKind::kSchema, "a forest needs at least one tree");
    require(!importances_.empty(), ErrorKind::kSchema, "importance vector must cover the feature count");
}

namespace {

constexpr double kMinGain = 1e-12;

// Weighted Gini impurity times weight: W * (1 - p^2 - (1-p)^2).
inline double weighted_gini(double w, double pos) {
    if (w <= 0.0) return 0.0;
    const double neg = w - pos;
    return w - (pos * pos + neg * neg) / w;
}

struct TreeBuilder {
    const FeatureMatrix& x;
    const std::vector<std::vector<double>>& columns;  // column-major copy of x
    std::span<const std::uint8_t> y;
    const ForestHyperparams& hp;
    // order[f] lists the in-bag rows sorted by feature f; every node owns one
    // contiguous range [begin, end) that is identical as a set across features.
    std::vector<std::vector<std::uint32_t>> order;
    std::vector<double> weight;
    std::vector<std::uint8_t> goes_left;
    std::vector<std::uint32_t> scratch;
    std::vector<double>& importance;
    Rng rng;

    // Stable partition of one range by goes_left, preserving the sort order on both sides.
    // Branch-free: both destinations are written and only one cursor advances.
    void partition(std::vector<std::uint32_t>& ord, std::size_t begin, std::size_t end) {
        scratch.resize(end - begin);
        std::size_t out = begin, spill = 0;
        for (std::size_t i = begin; i < end; ++i) {
            const auto r = ord[i];
            const std::size_t left = goes_left[r];
            ord[out] = r;
            scratch[spill] = r;
            out += left;
            spill += 1 - left;
        }
        std::copy(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(spill),
                  ord.begin() + static_cast<std::ptrdiff_t>(out));
    }

    struct Pending {
        std::size_t begin, end, depth;
        std::int32_t node;
    };

    DecisionTree build() {
        std::vector<TreeNode> nodes(1);
        std::vector<Pending> stack{{0, order[0].size(), 0, 0}};
        std::vector<std::size_t> features(x.cols());

        while (!stack.empty()) {
            const auto job = stack.back();
            stack.pop_back();

            double w = 0.0, pos = 0.0;
            for (std::size_t i = job.begin; i < job.end; ++i) {
                const auto r = order[0][i];
                w += weight[r];
                if (y[r]) pos += weight[r];
            }
            nodes[static_cast<std::size_t>(job.node)].value = w > 0.0 ? pos / w : 0.0;

            const auto min_leaf = static_cast<double>(hp.min_samples_leaf);
            if ((hp.max_depth && job.depth >= *hp.max_depth) || w < 2.0 * min_leaf || pos == 0.0 || pos == w) continue;

            features.resize(x.cols());
            std::iota(features.begin(), features.end(), std::size_t{0});
            if (hp.max_features < features.size()) {
                for (std::size_t i = 0; i < hp.max_features; ++i) {
                    std::uniform_int_distribution<std::size_t> pick(i, features.size() - 1);
                    std::swap(features[i], features[pick(rng)]);
                }
                features.resize(hp.max_features);
                std::sort(features.begin(), features.end());
            }

            const double parent = weighted_gini(w, pos);
            double best_gain = kMinGain;
            std::size_t best_feature = 0, best_split = 0;
            double best_threshold = 0.0;
            bool found = false;

            for (auto f : features) {
                const auto& ord = order[f];
                const auto& col = columns[f];
                double wl = 0.0, pl = 0.0;
                for (std::size_t i = job.begin; i + 1 < job.end; ++i) {
                    const auto r = ord[i];
                    wl += weight[r];
                    pl += y[r] * weight[r];
                    const double v = col[r], next = col[ord[i + 1]];
                    if (!(v < next)) continue;
                    if (wl < min_leaf || w - wl < min_leaf) continue;
                    const double gain = parent - weighted_gini(wl, pl) - weighted_gini(w - wl, pos - pl);
                    if (gain > best_gain) {
                        best_gain = gain;
                        best_feature = f;
                        best_split = i + 1;
                        double mid = 0.5 * (v + next);
                        if (!(mid < next)) mid = v;
                        best_threshold = mid;
                        found = true;
                    }
                }
            }
            if (!found) continue;

            importance[best_feature] += best_gain;
            for (std::size_t i = job.begin; i < job.end; ++i) goes_left[order[best_feature][i]] = i < best_split;
            for (std::size_t f = 0; f < x.cols(); ++f) partition(order[f], job.begin, job.end);

            const auto left = static_cast<std::int32_t>(nodes.size());
            nodes.emplace_back();
            nodes.emplace_back();
            auto& parent_node = nodes[static_cast<std::size_t>(job.node)];
            parent_node.feature = static_cast<std::int32_t>(best_feature);
            parent_node.threshold = best_threshold;
            parent_node.left = left;
            parent_node.right = left + 1;
            stack.push_back({best_split, job.end, job.depth + 1, left + 1});
            stack.push_back({job.begin, best_split, job.depth + 1, left});
        }
        return DecisionTree(std::move(nodes));
    }
};

}  // namespace

TrainedForest train_forest(const LabeledBatch& train, const ForestHyperparams& hp, Seed seed) {
    validate(train);
    const auto& x = train.features;
    validate(hp, x.cols());
    const auto n = train.size();
    const auto n_pos = train.positives();
    require(n_pos > 0 && n_pos < n, ErrorKind::kEmptyClass, "training data must contain both classes");

    // Rows sorted once per feature; each tree filters these by bootstrap membership.
    std::vector<std::vector<std::uint32_t>> presorted(x.cols());
    std::vector<std::vector<double>> columns(x.cols());
    for (std::size_t f = 0; f < x.cols(); ++f) {
        columns[f] = x.column(f);
        auto& ord = presorted[f];
        ord.resize(n);
        std::iota(ord.begin(), ord.end(), 0U);
        std::stable_sort(ord.begin(), ord.end(), [&](std::uint32_t a, std::uint32_t b) { return columns[f][a] < columns[f][b]; });
    }

    const auto draws = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(hp.bootstrap_fraction * n)));
    std::vector<double> importance(x.cols(), 0.0);
    std::vector<DecisionTree> trees;
    trees.reserve(hp.n_trees);

    for (std::size_t t = 0; t < hp.n_trees; ++t) {
        TreeBuilder builder{x, columns, train.labels, hp, {}, std::vector<double>(n, 0.0), std::vector<std::uint8_t>(n, 0),
                            {}, importance, Rng(derive_seed(seed, {t}))};
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        for (std::size_t i = 0; i < draws; ++i) builder.weight[pick(builder.rng)] += 1.0;
        builder.order.resize(x.cols());
        for (std::size_t f = 0; f < x.cols(); ++f) {
            auto& ord = builder.order[f];
            ord.reserve(draws);
            for (auto r : presorted[f])
                if (builder.weight[r] > 0.0) ord.push_back(r);
        }
        trees.push_back(builder.build());
    }

    const double total = std::accumulate(importance.begin(), importance.end(), 0.0);
    if (total > 0.0)
        for (auto& v : importance) v /= total;
    return TrainedForest(std::move(trees), hp, std::move(importance), n);
}

std::vector<double> predict_proba(const TrainedForest& model, const FeatureMatrix& data) {
    require(data.rows() == 0 || data.cols() == model.n_features(), ErrorKind::kSchema,
            "model expects " + std::to_string(model.n_features()) + " features, got " + std::to_string(data.cols()));
    std::vector<double> out(data.rows(), 0.0);
    const auto k = static_cast<double>(model.trees().size());
    for (std::size_t r = 0; r < data.rows(); ++r) {
        const auto row = data.row(r);
        double acc = 0.0;
        for (const auto& tree : model.trees()) acc += tree.predict(row);
        out[r] = acc / k;
    }
    return out;
}

std::vector<double> gini_importances(const TrainedForest& model) { return model.importances(); }

}  // namespace greenretrain

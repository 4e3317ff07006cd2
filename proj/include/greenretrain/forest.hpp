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
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "greenretrain/dataset.hpp"
#include "greenretrain/random.hpp"

namespace greenretrain {

struct ForestHyperparams {
    std::size_t n_trees = 100;
    std::optional<std::size_t> max_depth;  // empty = grow until pure or min_samples_leaf binds
    std::size_t min_samples_leaf = 1;
    std::size_t max_features = 1;
    double bootstrap_fraction = 1.0;

    friend bool operator==(const ForestHyperparams&, const ForestHyperparams&) = default;
};

void validate(const ForestHyperparams& hp, std::size_t n_features);

struct TreeNode {
    std::int32_t feature = -1;  // -1 marks a leaf
    double threshold = 0.0;     // rows with x[feature] <= threshold go left
    std::int32_t left = -1;
    std::int32_t right = -1;
    double value = 0.0;         // positive-class frequency at a leaf

    bool is_leaf() const noexcept { return feature < 0; }
    friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

/// Axis-aligned binary tree; node 0 is the root.
class DecisionTree {
public:
    DecisionTree() = default;
    explicit DecisionTree(std::vector<TreeNode> nodes);

    double predict(std::span<const double> row) const;
    const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }

    friend bool operator==(const DecisionTree&, const DecisionTree&) = default;

private:
    std::vector<TreeNode> nodes_;
};

class TrainedForest {
public:
    TrainedForest(std::vector<DecisionTree> trees, ForestHyperparams hyperparams, std::vector<double> importances,
                  std::size_t train_size);

    const std::vector<DecisionTree>& trees() const noexcept { return trees_; }
    const ForestHyperparams& hyperparams() const noexcept { return hyperparams_; }
    const std::vector<double>& importances() const noexcept { return importances_; }
    std::size_t train_size() const noexcept { return train_size_; }
    std::size_t n_features() const noexcept { return importances_.size(); }

    friend bool operator==(const TrainedForest&, const TrainedForest&) = default;

private:
    std::vector<DecisionTree> trees_;
    ForestHyperparams hyperparams_;
    std::vector<double> importances_;
    std::size_t train_size_ = 0;
};

/// Bootstrap-aggregated Gini trees. Tree t draws from the substream derive_seed(seed, {t}).
TrainedForest train_forest(const LabeledBatch& train, const ForestHyperparams& hp, Seed seed);

std::vector<double> predict_proba(const TrainedForest& model, const FeatureMatrix& data);

/// Total weighted Gini decrease per feature over all splits, normalized to sum to 1
/// (all zeros when no tree split).
std::vector<double> gini_importances(const TrainedForest& model);

}  // namespace greenretrain

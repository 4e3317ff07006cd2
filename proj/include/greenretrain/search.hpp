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
#include <optional>
#include <string>
#include <vector>

#include "greenretrain/dataset.hpp"
#include "greenretrain/forest.hpp"

namespace greenretrain {

enum class MaxFeaturesRule { kSqrt, kHalf, kAll };

std::size_t resolve_max_features(MaxFeaturesRule rule, std::size_t n_features);
std::string to_string(MaxFeaturesRule rule);
MaxFeaturesRule parse_max_features_rule(const std::string& text);

/// Discrete candidate sets; each candidate draws one value per hyperparameter uniformly.
struct SearchSpace {
    std::vector<std::size_t> n_trees{50, 100, 200};
    std::vector<std::optional<std::size_t>> max_depth{4, 8, 16, std::nullopt};
    std::vector<std::size_t> min_samples_leaf{1, 2, 5};
    std::vector<MaxFeaturesRule> max_features{MaxFeaturesRule::kSqrt, MaxFeaturesRule::kHalf, MaxFeaturesRule::kAll};
    std::size_t n_candidates = 10;
    double holdout_fraction = 0.2;

    friend bool operator==(const SearchSpace&, const SearchSpace&) = default;
};

void validate(const SearchSpace& space);

struct SearchResult {
    ForestHyperparams best;
    std::size_t n_evaluated = 0;
    double best_score = 0.0;
};

/// Scores each sampled configuration by holdout ROC AUC on a stratified split and
/// returns the best one (earliest wins ties). Does not refit on the full data.
SearchResult randomized_search(const LabeledBatch& train, const SearchSpace& space, Seed seed);

/// Stratified (fit, holdout) row indices; retries reshuffles up to 5 times.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_holdout(
    std::span<const std::uint8_t> labels, double holdout_fraction, Seed seed);

}  // namespace greenretrain

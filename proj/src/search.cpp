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
#include "greenretrain/search.hpp"

#include <algorithm>
#include <cmath>

#include "greenretrain/errors.hpp"
#include "greenretrain/metrics.hpp"

namespace greenretrain {

std::size_t resolve_max_features(MaxFeaturesRule rule, std::size_t n_features) {
    switch (rule) {
        case MaxFeaturesRule::kSqrt:
            return std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(n_features))));
        case MaxFeaturesRule::kHalf:
            return std::max<std::size_t>(1, n_features / 2);
        case MaxFeaturesRule::kAll:
            return n_features;
    }
    return n_features;
}

std::string to_string(MaxFeaturesRule rule) {
    switch (rule) {
        case MaxFeaturesRule::kSqrt: return "sqrt";
        case MaxFeaturesRule::kHalf: return "half";
        case MaxFeaturesRule::kAll: return "all";
    }
    return "all";
}

MaxFeaturesRule parse_max_features_rule(const std::string& text) {
    if (text == "sqrt") return MaxFeaturesRule::kSqrt;
    if (text == "half") return MaxFeaturesRule::kHalf;
    if (text == "all") return MaxFeaturesRule::kAll;
    fail(ErrorKind::kConfiguration, "unknown max_features rule '" + text + "' (expected sqrt, half or all)");
}

void validate(const SearchSpace& space) {
    require(space.n_candidates >= 1, ErrorKind::kConfiguration, "n_candidates must be >= 1");
    require(space.holdout_fraction > 0.0 && space.holdout_fraction < 1.0, ErrorKind::kConfiguration,
            "holdout_fraction must lie in (0, 1)");
    require(!space.n_trees.empty() && !space.max_depth.empty() && !space.min_samples_leaf.empty() &&
                !space.max_features.empty(),
            ErrorKind::kConfiguration, "every hyperparameter needs at least one candidate value");
    for (auto t : space.n_trees) require(t >= 1, ErrorKind::kConfiguration, "n_trees candidates must be >= 1");
    for (auto l : space.min_samples_leaf)
        require(l >= 1, ErrorKind::kConfiguration, "min_samples_leaf candidates must be >= 1");
    for (const auto& d : space.max_depth)
        require(!d || *d >= 1, ErrorKind::kConfiguration, "max_depth candidates must be >= 1");
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_holdout(
    std::span<const std::uint8_t> labels, double holdout_fraction, Seed seed) {
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] ? pos : neg).push_back(i);
    require(!pos.empty() && !neg.empty(), ErrorKind::kEmptyClass, "holdout split needs both classes");

    auto holdout_count = [&](std::size_t count) {
        const auto k = static_cast<std::size_t>(std::llround(holdout_fraction * static_cast<double>(count)));
        return std::clamp<std::size_t>(k, 1, count);
    };

    Rng rng(seed);
    constexpr int kAttempts = 5;
    for (int attempt = 0; attempt < kAttempts; ++attempt) {
        std::shuffle(pos.begin(), pos.end(), rng);
        std::shuffle(neg.begin(), neg.end(), rng);
        const auto hp = holdout_count(pos.size()), hn = holdout_count(neg.size());
        std::vector<std::size_t> fit, hold;
        hold.insert(hold.end(), pos.begin(), pos.begin() + static_cast<std::ptrdiff_t>(hp));
        hold.insert(hold.end(), neg.begin(), neg.begin() + static_cast<std::ptrdiff_t>(hn));
        fit.insert(fit.end(), pos.begin() + static_cast<std::ptrdiff_t>(hp), pos.end());
        fit.insert(fit.end(), neg.begin() + static_cast<std::ptrdiff_t>(hn), neg.end());

        auto both_classes = [&](const std::vector<std::size_t>& rows) {
            bool p = false, q = false;
            for (auto r : rows) (labels[r] ? p : q) = true;
            return p && q;
        };
        if (both_classes(fit) && both_classes(hold)) {
            std::sort(fit.begin(), fit.end());
            std::sort(hold.begin(), hold.end());
            return {std::move(fit), std::move(hold)};
        }
    }
    fail(ErrorKind::kStratification, "could not form a holdout split with both classes on each side");
}

SearchResult randomized_search(const LabeledBatch& train, const SearchSpace& space, Seed seed) {
    validate(space);
    validate(train);
    const auto d = train.features.cols();

    auto [fit_rows, hold_rows] = stratified_holdout(train.labels, space.holdout_fraction, derive_seed(seed, {0}));
    LabeledBatch fit{train.period, train.features.select_rows(fit_rows), {}};
    for (auto r : fit_rows) fit.labels.push_back(train.labels[r]);
    const auto hold_x = train.features.select_rows(hold_rows);
    std::vector<std::uint8_t> hold_y;
    for (auto r : hold_rows) hold_y.push_back(train.labels[r]);

    Rng rng(derive_seed(seed, {1}));
    auto draw = [&rng](const auto& values) {
        std::uniform_int_distribution<std::size_t> pick(0, values.size() - 1);
        return values[pick(rng)];
    };

    SearchResult result;
    result.best_score = -1.0;
    for (std::size_t c = 0; c < space.n_candidates; ++c) {
        ForestHyperparams hp;
        hp.n_trees = draw(space.n_trees);
        hp.max_depth = draw(space.max_depth);
        hp.min_samples_leaf = draw(space.min_samples_leaf);
        hp.max_features = resolve_max_features(draw(space.max_features), d);
        const auto model = train_forest(fit, hp, derive_seed(seed, {2, c}));
        const double score = roc_auc(predict_proba(model, hold_x), hold_y);
        ++result.n_evaluated;
        if (score > result.best_score) {
            result.best_score = score;
            result.best = hp;
        }
    }
    return result;
}

}  // namespace greenretrain

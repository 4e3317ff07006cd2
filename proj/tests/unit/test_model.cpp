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
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "greenretrain/errors.hpp"
#include "greenretrain/forest.hpp"
#include "greenretrain/metrics.hpp"
#include "greenretrain/search.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace greenretrain;

namespace {

ForestHyperparams hp(std::size_t trees, std::size_t max_features, std::optional<std::size_t> depth = std::nullopt,
                     std::size_t leaf = 1) {
    ForestHyperparams h;
    h.n_trees = trees;
    h.max_features = max_features;
    h.max_depth = depth;
    h.min_samples_leaf = leaf;
    return h;
}

// Label = XOR of the signs of columns 0 and 1: a stump cannot separate it.
LabeledBatch xor_batch(std::size_t rows, std::uint64_t seed) {
    auto x = fixtures::gaussian(rows, 3, seed);
    std::vector<std::uint8_t> y(rows);
    for (std::size_t r = 0; r < rows; ++r) y[r] = (x(r, 0) > 0) != (x(r, 1) > 0);
    return {0, std::move(x), std::move(y)};
}

}  // namespace

TEST(RocAuc, WorkedExamples) {
    const std::vector<double> s1{0.9, 0.8, 0.7, 0.1};
    const std::vector<std::uint8_t> y1{1, 1, 0, 0};
    EXPECT_DOUBLE_EQ(roc_auc(s1, y1), 1.0);
    const std::vector<double> s2(6, 0.3);
    const std::vector<std::uint8_t> y2{1, 0, 1, 0, 0, 1};
    EXPECT_DOUBLE_EQ(roc_auc(s2, y2), 0.5);
    const std::vector<double> s3{0.6, 0.2, 0.4};
    const std::vector<std::uint8_t> y3{1, 1, 0};
    EXPECT_DOUBLE_EQ(roc_auc(s3, y3), 0.5);
}

TEST(RocAuc, SingleClassIsUndefined) {
    const std::vector<double> s{0.1, 0.2};
    const std::vector<std::uint8_t> y{1, 1};
    EXPECT_THROW(roc_auc(s, y), Error);
    try {
        roc_auc(s, y);
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::kUndefinedMetric);
    }
}

TEST(RocAuc, MatchesOracleFlipsAndIsRankInvariant) {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 2 + rng() % 40;
        std::vector<double> s(n);
        std::vector<std::uint8_t> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = static_cast<double>(rng() % 1000) / 1000.0;
            y[i] = rng() % 2;
        }
        y[0] = 1;
        y[1] = 0;
        const double auc = roc_auc(s, y);
        EXPECT_EQ(auc, oracle::roc_auc(s, y));

        std::vector<double> transformed(n);
        std::transform(s.begin(), s.end(), transformed.begin(), [](double v) { return std::exp(3.0 * v) - 7.0; });
        EXPECT_EQ(roc_auc(transformed, y), auc);

        // Distinct scores: flipping the labels mirrors the curve.
        std::vector<double> distinct(n);
        std::iota(distinct.begin(), distinct.end(), 0.0);
        std::shuffle(distinct.begin(), distinct.end(), rng);
        std::vector<std::uint8_t> flipped(n);
        std::transform(y.begin(), y.end(), flipped.begin(), [](std::uint8_t v) -> std::uint8_t { return 1 - v; });
        EXPECT_DOUBLE_EQ(roc_auc(distinct, y) + roc_auc(distinct, flipped), 1.0);
    }
}

TEST(Forest, SingleClassIsAnError) {
    LabeledBatch b{0, FeatureMatrix(3, {"a"}, {1, 2, 3}), {1, 1, 1}};
    try {
        train_forest(b, hp(2, 1), 0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::kEmptyClass);
    }
    b.labels = {0, 0, 0};
    EXPECT_THROW(train_forest(b, hp(2, 1), 0), Error);
}

TEST(Forest, InvalidHyperparameters) {
    const auto b = fixtures::threshold_batch(0, 50, 3, 1);
    EXPECT_THROW(train_forest(b, hp(0, 1), 0), Error);
    EXPECT_THROW(train_forest(b, hp(5, 4), 0), Error);
    EXPECT_THROW(train_forest(b, hp(5, 0), 0), Error);
    EXPECT_THROW(train_forest(b, hp(5, 1, std::nullopt, 0), 0), Error);
}

TEST(Forest, SeparableDataIsLearned) {
    const auto train = fixtures::threshold_batch(0, 400, 4, 2);
    const auto test = fixtures::threshold_batch(0, 400, 4, 3);
    const auto model = train_forest(train, hp(20, 2), 5);
    const auto p = predict_proba(model, test.features);
    EXPECT_GT(roc_auc(p, test.labels), 0.97);
    for (double v : p) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
    }
}

TEST(Forest, DeterministicGivenSeed) {
    const auto b = fixtures::threshold_batch(0, 200, 5, 4);
    const auto a = train_forest(b, hp(10, 2, 6), 9);
    EXPECT_EQ(a, train_forest(b, hp(10, 2, 6), 9));
    EXPECT_FALSE(a == train_forest(b, hp(10, 2, 6), 10));
}

TEST(Forest, PredictionsAverageTreeOutputs) {
    const auto b = fixtures::threshold_batch(0, 150, 3, 6);
    const auto model = train_forest(b, hp(7, 1, 4), 2);
    const auto p = predict_proba(model, b.features);
    for (std::size_t r = 0; r < b.size(); r += 7) {
        double acc = 0.0;
        for (const auto& t : model.trees()) acc += t.predict(b.features.row(r));
        EXPECT_DOUBLE_EQ(p[r], acc / model.trees().size());
    }
}

TEST(Forest, HandBuiltLeafFrequencies) {
    // Stump on feature 0 at 0.5: left leaf 3 positives of 4, right leaf 1 of 4.
    const std::vector<TreeNode> nodes{{0, 0.5, 1, 2, 0.5}, {-1, 0.0, -1, -1, 0.75}, {-1, 0.0, -1, -1, 0.25}};
    const TrainedForest single({DecisionTree(nodes)}, hp(1, 1), {1.0}, 8);
    const FeatureMatrix x(2, {"a"}, {0.2, 0.9});
    EXPECT_EQ(predict_proba(single, x), (std::vector<double>{0.75, 0.25}));

    const TrainedForest triple({DecisionTree(nodes), DecisionTree(nodes), DecisionTree(nodes)}, hp(3, 1), {1.0}, 8);
    EXPECT_EQ(predict_proba(triple, x), (std::vector<double>{0.75, 0.25}));
    EXPECT_TRUE(predict_proba(single, FeatureMatrix(0, {"a"})).empty());
    EXPECT_THROW(predict_proba(single, FeatureMatrix(1, {"a", "b"}, {0.0, 0.0})), Error);
}

TEST(Forest, RowsOnTheThresholdGoLeft) {
    const std::vector<TreeNode> nodes{{0, 0.5, 1, 2, 0.5}, {-1, 0.0, -1, -1, 1.0}, {-1, 0.0, -1, -1, 0.0}};
    const DecisionTree t(nodes);
    const std::vector<double> row{0.5};
    EXPECT_EQ(t.predict(row), 1.0);
}

TEST(Forest, MalformedTreeIsRejected) {
    EXPECT_THROW(DecisionTree({{0, 0.5, 1, 7, 0.5}, {-1, 0.0, -1, -1, 1.0}}), Error);
}

TEST(Importances, SignalFeatureDominatesAndSumsToOne) {
    const auto b = fixtures::threshold_batch(0, 500, 5, 8, 3);
    const auto model = train_forest(b, hp(20, 2, 6), 1);
    const auto imp = gini_importances(model);
    ASSERT_EQ(imp.size(), 5U);
    for (std::size_t f = 0; f < 5; ++f) {
        EXPECT_GE(imp[f], 0.0);
        if (f != 3) EXPECT_GT(imp[3], imp[f]);
    }
    EXPECT_NEAR(std::accumulate(imp.begin(), imp.end(), 0.0), 1.0, 1e-9);
}

TEST(Importances, NoSplitsGiveZeros) {
    const auto b = fixtures::threshold_batch(0, 40, 3, 9);
    const auto model = train_forest(b, hp(4, 3, std::nullopt, 40), 1);
    for (const auto& t : model.trees()) EXPECT_EQ(t.nodes().size(), 1U);
    EXPECT_EQ(gini_importances(model), std::vector<double>(3, 0.0));
}

TEST(Importances, PermutingColumnsPermutesImportances) {
    // With every feature considered at every node, the bootstrap and split choices do
    // not depend on column order (continuous data, so no cross-feature gain ties).
    const auto b = fixtures::threshold_batch(0, 300, 4, 12, 1);
    const std::vector<std::size_t> perm{2, 0, 3, 1};
    const LabeledBatch permuted{0, b.features.select_columns(perm), b.labels};
    const auto a = gini_importances(train_forest(b, hp(10, 4, 5), 3));
    const auto p = gini_importances(train_forest(permuted, hp(10, 4, 5), 3));
    for (std::size_t i = 0; i < perm.size(); ++i) EXPECT_DOUBLE_EQ(p[i], a[perm[i]]);
}

TEST(Search, SingleCandidateIsReturned) {
    SearchSpace space;
    space.n_trees = {7};
    space.max_depth = {3};
    space.min_samples_leaf = {2};
    space.max_features = {MaxFeaturesRule::kHalf};
    space.n_candidates = 1;
    const auto r = randomized_search(fixtures::threshold_batch(0, 200, 4, 1), space, 1);
    EXPECT_EQ(r.n_evaluated, 1U);
    EXPECT_EQ(r.best.n_trees, 7U);
    EXPECT_EQ(r.best.max_depth, std::optional<std::size_t>(3));
    EXPECT_EQ(r.best.min_samples_leaf, 2U);
    EXPECT_EQ(r.best.max_features, 2U);
}

TEST(Search, PrefersDepthOnNonLinearData) {
    SearchSpace space;
    space.n_trees = {20};
    space.max_depth = {1, 8};
    space.min_samples_leaf = {1};
    space.max_features = {MaxFeaturesRule::kAll};
    space.n_candidates = 8;
    const auto train = xor_batch(600, 3);
    const auto r = randomized_search(train, space, 4);
    EXPECT_EQ(r.best.max_depth, std::optional<std::size_t>(8));
    const auto again = randomized_search(train, space, 4);
    EXPECT_EQ(again.best, r.best);
    EXPECT_EQ(again.best_score, r.best_score);
}

TEST(Search, MaxFeaturesRules) {
    EXPECT_EQ(resolve_max_features(MaxFeaturesRule::kSqrt, 20), 4U);
    EXPECT_EQ(resolve_max_features(MaxFeaturesRule::kHalf, 20), 10U);
    EXPECT_EQ(resolve_max_features(MaxFeaturesRule::kAll, 20), 20U);
    EXPECT_EQ(resolve_max_features(MaxFeaturesRule::kSqrt, 1), 1U);
    EXPECT_EQ(resolve_max_features(MaxFeaturesRule::kHalf, 1), 1U);
    EXPECT_EQ(parse_max_features_rule("half"), MaxFeaturesRule::kHalf);
    EXPECT_THROW(parse_max_features_rule("most"), Error);
}

TEST(Search, StratifiedHoldoutKeepsBothClasses) {
    std::vector<std::uint8_t> y(50, 0);
    y[3] = y[17] = y[40] = 1;
    const auto [fit, hold] = stratified_holdout(y, 0.2, 8);
    EXPECT_EQ(fit.size() + hold.size(), y.size());
    auto positives = [&](const std::vector<std::size_t>& idx) {
        return std::count_if(idx.begin(), idx.end(), [&](std::size_t i) { return y[i] == 1; });
    };
    EXPECT_GE(positives(fit), 1);
    EXPECT_GE(positives(hold), 1);
}

TEST(Search, TooFewPerClassIsAStratificationError) {
    std::vector<std::uint8_t> y(20, 0);
    y[0] = 1;
    try {
        stratified_holdout(y, 0.2, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::kStratification);
    }
}

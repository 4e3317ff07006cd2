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
#include "greenretrain/detector.hpp"

#include <algorithm>
#include <numeric>

#include "greenretrain/errors.hpp"
#include "greenretrain/ks.hpp"
#include "greenretrain/pca.hpp"

namespace greenretrain {

namespace {
constexpr std::size_t kMinWindowRows = 10;
}

std::string to_string(DetectorMethod method) {
    switch (method) {
        case DetectorMethod::kKsAll: return "ks_all";
        case DetectorMethod::kKsPca: return "ks_pca";
        case DetectorMethod::kKsFi: return "ks_fi";
    }
    return "ks_all";
}

DetectorMethod parse_detector_method(const std::string& text) {
    std::string t = text;
    std::replace(t.begin(), t.end(), '-', '_');
    if (t == "ks_all") return DetectorMethod::kKsAll;
    if (t == "ks_pca") return DetectorMethod::kKsPca;
    if (t == "ks_fi") return DetectorMethod::kKsFi;
    fail(ErrorKind::kConfiguration, "unknown detector method '" + text + "'");
}

void validate(const DetectorConfig& config) {
    require(config.alpha > 0.0 && config.alpha < 1.0, ErrorKind::kConfiguration, "alpha must lie in (0, 1)");
    require(config.variance_retained > 0.0 && config.variance_retained <= 1.0, ErrorKind::kConfiguration,
            "variance_retained must lie in (0, 1]");
    require(config.max_samples >= kMinWindowRows, ErrorKind::kConfiguration, "max_samples must be >= 10");
}

std::size_t DriftVerdict::min_p_index() const {
    require(!per_dimension.empty(), ErrorKind::kInsufficientData, "verdict has no tested dimensions");
    return static_cast<std::size_t>(std::distance(
        per_dimension.begin(), std::min_element(per_dimension.begin(), per_dimension.end(),
                                                [](const auto& a, const auto& b) { return a.p_value < b.p_value; })));
}

std::vector<std::size_t> select_important_features(std::span<const double> importances) {
    require(!importances.empty(), ErrorKind::kSchema, "importance vector is empty");
    for (double v : importances) require(v >= 0.0, ErrorKind::kValidation, "importances must be non-negative");
    const double mean = std::accumulate(importances.begin(), importances.end(), 0.0) / static_cast<double>(importances.size());
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < importances.size(); ++i)
        if (importances[i] >= mean) keep.push_back(i);
    // Rounding in the mean can push the maximum below it; the top feature always survives.
    if (keep.empty())
        keep.push_back(static_cast<std::size_t>(
            std::distance(importances.begin(), std::max_element(importances.begin(), importances.end()))));
    return keep;
}

namespace {

FeatureMatrix cap_rows(const FeatureMatrix& m, std::size_t cap, Seed seed) {
    if (m.rows() <= cap) return m;
    std::vector<std::size_t> idx(m.rows());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    Rng rng(seed);
    for (std::size_t i = 0; i < cap; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
        std::swap(idx[i], idx[pick(rng)]);
    }
    idx.resize(cap);
    std::sort(idx.begin(), idx.end());
    return m.select_rows(idx);
}

}  // namespace

DetectionWindows subsample_windows(const DetectorConfig& config, const FeatureMatrix& reference,
                                   const FeatureMatrix& incoming) {
    validate(config);
    require(reference.cols() == incoming.cols(), ErrorKind::kSchema,
            "reference has " + std::to_string(reference.cols()) + " features, incoming has " +
                std::to_string(incoming.cols()));
    DetectionWindows w{cap_rows(reference, config.max_samples, derive_seed(config.seed, {0})),
                       cap_rows(incoming, config.max_samples, derive_seed(config.seed, {1}))};
    require(w.reference.rows() >= kMinWindowRows && w.incoming.rows() >= kMinWindowRows,
            ErrorKind::kInsufficientData, "drift detection needs at least 10 rows per window");
    return w;
}

DetectionWindows reduce_dimensions(const DetectorConfig& config, const DetectionWindows& windows,
                                   std::span<const double> importances) {
    switch (config.method) {
        case DetectorMethod::kKsAll:
            return windows;
        case DetectorMethod::kKsPca: {
            const auto pca = fit_pca(windows.reference, config.variance_retained);
            return {project(pca, windows.reference), project(pca, windows.incoming)};
        }
        case DetectorMethod::kKsFi: {
            require(!importances.empty(), ErrorKind::kConfiguration, "KS-FI needs the deployed model's importances");
            require(importances.size() == windows.reference.cols(), ErrorKind::kSchema,
                    "importance vector length does not match feature count");
            const auto keep = select_important_features(importances);
            return {windows.reference.select_columns(keep), windows.incoming.select_columns(keep)};
        }
    }
    return windows;
}

EmpiricalDistributions estimate_distributions(const DetectionWindows& windows) {
    EmpiricalDistributions e;
    e.dimensions = windows.reference.feature_names();
    for (std::size_t c = 0; c < windows.reference.cols(); ++c) {
        auto a = windows.reference.column(c);
        auto b = windows.incoming.column(c);
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        e.reference.push_back(std::move(a));
        e.incoming.push_back(std::move(b));
    }
    return e;
}

DriftVerdict test_distributions(const DetectorConfig& config, const EmpiricalDistributions& distributions) {
    DriftVerdict v;
    v.method = config;
    v.dimensions_tested = distributions.dimensions.size();
    require(v.dimensions_tested > 0, ErrorKind::kInsufficientData, "no dimensions to test");
    v.corrected_alpha = config.alpha / static_cast<double>(v.dimensions_tested);
    double min_p = 1.0;
    for (std::size_t i = 0; i < v.dimensions_tested; ++i) {
        const auto& a = distributions.reference[i];
        const auto& b = distributions.incoming[i];
        const double d = ks_statistic_sorted(a, b);
        const double p = ks_pvalue(d, a.size(), b.size());
        v.per_dimension.push_back({distributions.dimensions[i], d, p});
        min_p = std::min(min_p, p);
    }
    v.drift = min_p < v.corrected_alpha;
    return v;
}

DriftVerdict detect_drift(const DetectorConfig& config, const FeatureMatrix& train_window,
                          const FeatureMatrix& incoming, std::span<const double> importances) {
    const auto windows = subsample_windows(config, train_window, incoming);
    const auto reduced = reduce_dimensions(config, windows, importances);
    return test_distributions(config, estimate_distributions(reduced));
}

DriftVerdict detect_drift(const DetectorConfig& config, const FeatureMatrix& train_window,
                          const FeatureMatrix& incoming, const TrainedForest* model) {
    if (config.method == DetectorMethod::kKsFi)
        require(model != nullptr, ErrorKind::kConfiguration, "KS-FI needs a trained model");
    return detect_drift(config, train_window, incoming,
                        model ? std::span<const double>(model->importances()) : std::span<const double>{});
}

}  // namespace greenretrain

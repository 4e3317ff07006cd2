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
#include <span>
#include <string>
#include <vector>

#include "greenretrain/dataset.hpp"
#include "greenretrain/forest.hpp"
#include "greenretrain/random.hpp"

namespace greenretrain {

enum class DetectorMethod { kKsAll, kKsPca, kKsFi };

std::string to_string(DetectorMethod method);
/// Accepts both `ks-all` and `ks_all` spellings.
DetectorMethod parse_detector_method(const std::string& text);

struct DetectorConfig {
    DetectorMethod method = DetectorMethod::kKsAll;
    double alpha = 0.05;
    double variance_retained = 0.95;
    std::size_t max_samples = 5000;
    Seed seed = 0;

    friend bool operator==(const DetectorConfig&, const DetectorConfig&) = default;
};

void validate(const DetectorConfig& config);

struct DimensionResult {
    std::string dimension;
    double statistic = 0.0;
    double p_value = 1.0;

    friend bool operator==(const DimensionResult&, const DimensionResult&) = default;
};

struct DriftVerdict {
    bool drift = false;
    std::vector<DimensionResult> per_dimension;
    double corrected_alpha = 0.0;  // Bonferroni: alpha / dimensions_tested
    DetectorConfig method;
    std::size_t dimensions_tested = 0;

    /// Index into per_dimension of the smallest p-value.
    std::size_t min_p_index() const;

    friend bool operator==(const DriftVerdict&, const DriftVerdict&) = default;
};

/// Indices whose importance is at least the arithmetic mean.
std::vector<std::size_t> select_important_features(std::span<const double> importances);

// The detector runs as separately measurable stages:
//   subsample_windows -> reduce_dimensions -> estimate_distributions -> test_distributions.

struct DetectionWindows {
    FeatureMatrix reference;
    FeatureMatrix incoming;
};

/// Caps each window at config.max_samples rows, sampled without replacement.
DetectionWindows subsample_windows(const DetectorConfig& config, const FeatureMatrix& reference,
                                   const FeatureMatrix& incoming);

/// KS_ALL: identity. KS_PCA: PCA fitted on the reference, both windows projected.
/// KS_FI: columns restricted to select_important_features(importances).
DetectionWindows reduce_dimensions(const DetectorConfig& config, const DetectionWindows& windows,
                                   std::span<const double> importances);

/// Sorted per-dimension samples, i.e. the empirical CDFs of each window.
struct EmpiricalDistributions {
    std::vector<std::string> dimensions;
    std::vector<std::vector<double>> reference;
    std::vector<std::vector<double>> incoming;
};

EmpiricalDistributions estimate_distributions(const DetectionWindows& windows);

DriftVerdict test_distributions(const DetectorConfig& config, const EmpiricalDistributions& distributions);

/// Compares the training window with an incoming batch. `importances` is required for KS_FI.
DriftVerdict detect_drift(const DetectorConfig& config, const FeatureMatrix& train_window,
                          const FeatureMatrix& incoming, std::span<const double> importances = {});

DriftVerdict detect_drift(const DetectorConfig& config, const FeatureMatrix& train_window,
                          const FeatureMatrix& incoming, const TrainedForest* model);

}  // namespace greenretrain

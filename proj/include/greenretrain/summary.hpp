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
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "greenretrain/lifecycle.hpp"

namespace greenretrain {

/// Lifecycle reports from one experiment matrix.
struct RunArtifact {
    std::vector<LifecycleReport> reports;
};

/// Reads every `*.json` run file in `dir`, in file-name order.
RunArtifact load_run_artifact(const std::filesystem::path& dir);

struct ConfigSummary {
    std::string configuration;
    std::size_t n_runs = 0;
    double train_detect_j_median = 0.0;
    double train_detect_j_iqr = 0.0;
    double infer_j_median = 0.0;
    double infer_j_iqr = 0.0;
    std::optional<double> mean_roc_auc_median;
    std::optional<double> mean_roc_auc_iqr;
    double retrain_count_median = 0.0;
    std::optional<double> overhead_pct;       // informed configurations only
    std::optional<double> annual_train_detect_j;  // needs a declared span
};

struct FigurePoint {
    std::string configuration;
    Seed seed = 0;
    std::size_t period = 0;
    double cumulative_train_j = 0.0;
    double cumulative_detect_j = 0.0;
    double cumulative_infer_j = 0.0;
    std::optional<double> roc_auc;
    std::optional<bool> retrained;  // empty for the initial-training period
};

struct SummaryTables {
    std::vector<ConfigSummary> configurations;  // canonical configuration order
    std::vector<FigurePoint> figure;            // one row per (configuration, seed, period)
};

SummaryTables summarize_runs(const RunArtifact& runs);

enum class ComparisonMetric { kTrainDetectJ, kInferJ, kMeanRocAuc };
std::string to_string(ComparisonMetric metric);

struct ComparisonRow {
    std::string config_a;
    std::string config_b;
    ComparisonMetric metric = ComparisonMetric::kTrainDetectJ;
    std::size_t n_pairs = 0;
    std::optional<double> statistic;
    std::optional<double> p_value;  // empty when the test is not applicable
    double median_difference = 0.0;  // median of a - b over seed-paired runs
    std::string note;
};

using ComparisonTable = std::vector<ComparisonRow>;

/// Seed-paired Wilcoxon comparisons for each (A, B) over all three metrics.
ComparisonTable compare_configurations(const RunArtifact& runs,
                                       const std::vector<std::pair<std::string, std::string>>& pairs);

/// Writes summary.csv, comparisons.csv and figure_data.csv.
void emit_tables(const SummaryTables& summary, const ComparisonTable& comparisons,
                 const std::filesystem::path& out_dir, double alpha = 0.05);

}  // namespace greenretrain

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
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "greenretrain/random.hpp"

namespace greenretrain {

/// Dense row-major matrix of finite doubles with named columns.
class FeatureMatrix {
public:
    FeatureMatrix() = default;
    FeatureMatrix(std::size_t rows, std::vector<std::string> feature_names);
    FeatureMatrix(std::size_t rows, std::vector<std::string> feature_names, std::vector<double> values);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return names_.size(); }
    const std::vector<std::string>& feature_names() const noexcept { return names_; }
    const std::vector<double>& values() const noexcept { return values_; }

    double operator()(std::size_t r, std::size_t c) const { return values_[r * cols() + c]; }
    double& operator()(std::size_t r, std::size_t c) { return values_[r * cols() + c]; }

    std::span<const double> row(std::size_t r) const { return {values_.data() + r * cols(), cols()}; }
    std::vector<double> column(std::size_t c) const;

    FeatureMatrix select_rows(std::span<const std::size_t> indices) const;
    FeatureMatrix select_columns(std::span<const std::size_t> indices) const;

    /// Appends the rows of `other`; column names must match.
    void append_rows(const FeatureMatrix& other);

    friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::vector<std::string> names_;
    std::vector<double> values_;
};

/// One period of labeled data. Labels are 1 for failure, 0 otherwise.
struct LabeledBatch {
    std::size_t period = 0;
    FeatureMatrix features;
    std::vector<std::uint8_t> labels;

    std::size_t size() const noexcept { return labels.size(); }
    std::size_t positives() const noexcept;

    friend bool operator==(const LabeledBatch&, const LabeledBatch&) = default;
};

void validate(const LabeledBatch& batch);

/// Ordered batches with contiguous periods starting at 0 and a shared schema.
class BatchStream {
public:
    BatchStream() = default;
    explicit BatchStream(std::vector<LabeledBatch> batches);

    const std::vector<LabeledBatch>& batches() const noexcept { return batches_; }
    const std::vector<std::string>& feature_names() const noexcept { return names_; }
    std::size_t size() const noexcept { return batches_.size(); }
    const LabeledBatch& operator[](std::size_t i) const { return batches_[i]; }

    friend bool operator==(const BatchStream&, const BatchStream&) = default;

private:
    std::vector<LabeledBatch> batches_;
    std::vector<std::string> names_;
};

/// Concatenates batches into a single batch tagged with the last period.
LabeledBatch concatenate(std::span<const LabeledBatch> batches);

/// FNV-1a hash over schema, periods, labels and value bit patterns.
std::string fingerprint(const BatchStream& stream);

struct ScalerParams {
    std::vector<double> means;
    std::vector<double> stds;
};

ScalerParams fit_scaler(const FeatureMatrix& train);
FeatureMatrix apply_scaler(const ScalerParams& params, const FeatureMatrix& data);

/// Keeps every positive and at most `negatives_per_positive` negatives per positive.
LabeledBatch downsample(const LabeledBatch& batch, std::size_t negatives_per_positive, Seed seed);

/// Returns (training portion, evaluation portion); the training portion gets ceil(P/2) periods.
std::pair<std::vector<LabeledBatch>, std::vector<LabeledBatch>> split_initial(const BatchStream& stream);

inline constexpr const char* kPeriodColumn = "period";
inline constexpr const char* kLabelColumn = "label";

BatchStream load_csv_stream(const std::filesystem::path& path,
                            const std::string& label_column = kLabelColumn,
                            const std::string& period_column = kPeriodColumn);

/// Writes `period,label,<features...>` with shortest round-trip number formatting.
void write_csv_stream(const BatchStream& stream, const std::filesystem::path& path);

struct DriftEvent {
    std::size_t period = 0;
    std::size_t feature = 0;
    double mean_shift_sigmas = 0.0;
};

struct SyntheticDriftSpec {
    std::size_t n_features = 10;
    std::size_t n_periods = 10;
    std::size_t samples_per_period = 1000;
    double failure_rate = 0.2;
    std::vector<DriftEvent> drift_events;
    std::vector<std::size_t> label_signal_features;
    double signal_weight = 1.5;
    Seed seed = 0;
};

void validate(const SyntheticDriftSpec& spec);

/// Gaussian features whose generating means move at drift events. Labels follow a
/// logistic link on the signal features measured relative to their current means,
/// so a shift also invalidates previously learned decision thresholds.
BatchStream generate_synthetic_stream(const SyntheticDriftSpec& spec);

}  // namespace greenretrain

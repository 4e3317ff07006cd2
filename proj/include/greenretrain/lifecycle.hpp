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
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "greenretrain/dataset.hpp"
#include "greenretrain/detector.hpp"
#include "greenretrain/energy.hpp"
#include "greenretrain/policy.hpp"
#include "greenretrain/search.hpp"

namespace greenretrain {

struct SimulationConfig {
    std::string name;
    RetrainTrigger trigger;
    WindowPolicy window;  // window_periods == 0 resolves to the training-portion length
    SearchSpace search;
    std::optional<std::size_t> downsample_ratio = 10;  // 1:k, empty disables
    MeterSettings meter;
    Seed seed = 0;

    friend bool operator==(const SimulationConfig&, const SimulationConfig&) = default;
};

/// Parameters shared by every configuration of an experiment.
struct LifecycleSettings {
    DetectorConfig detector;
    SearchSpace search;
    std::optional<std::size_t> downsample_ratio = 10;
    std::size_t window_periods = 0;
    MeterSettings meter;
};

SimulationConfig make_simulation_config(std::string_view name, const LifecycleSettings& settings, Seed seed = 0);

/// The name must agree with the trigger, detector and window combination.
void validate(const SimulationConfig& config);

struct StreamSpan {
    double value = 0.0;
    SpanUnit unit = SpanUnit::kMonths;

    friend bool operator==(const StreamSpan&, const StreamSpan&) = default;
};

struct PeriodRecord {
    std::size_t period = 0;
    bool retrained = false;
    std::optional<bool> drift_detected;  // empty for non-informed triggers
    std::optional<double> roc_auc;       // empty when the period holds a single class
    double train_j = 0.0;
    double detect_j = 0.0;
    double infer_j = 0.0;
    std::size_t train_rows = 0;          // rows the model used for this period was fitted on
    std::size_t model_first_period = 0;  // training-data audit trail of that model
    std::size_t model_last_period = 0;

    friend bool operator==(const PeriodRecord&, const PeriodRecord&) = default;
};

struct LifecycleReport {
    SimulationConfig config;
    std::string stream_fingerprint;
    std::size_t training_periods = 0;
    std::size_t initial_train_rows = 0;
    std::vector<PeriodRecord> records;
    EnergyLedger ledger;
    std::optional<double> mean_roc_auc;
    std::size_t retrain_count = 0;
    std::vector<double> final_importances;  // importances of the model deployed at the end
    std::optional<StreamSpan> span;
    std::vector<std::string> warnings;

    friend bool operator==(const LifecycleReport&, const LifecycleReport&) = default;
};

/// Replaces the drift detector, e.g. with a stub. Receives the scaled window, the
/// scaled incoming batch and the deployed model's importances.
using DetectorOverride =
    std::function<DriftVerdict(const FeatureMatrix& window, const FeatureMatrix& incoming, std::span<const double>)>;

struct LifecycleHooks {
    DetectorOverride detector;
    EnergyMeter* meter = nullptr;  // overrides config.meter when set
};

/// Initial training on the first half of the stream, then for each evaluation period:
/// detect (informed only), maybe retrain on data through the previous period, infer,
/// score, and finally admit the period into the training window.
LifecycleReport run_lifecycle(const BatchStream& stream, const SimulationConfig& config,
                              const LifecycleHooks& hooks = {});

struct MatrixRun {
    std::size_t config_index = 0;
    Seed seed = 0;

    friend bool operator==(const MatrixRun&, const MatrixRun&) = default;
};

struct MatrixResult {
    std::vector<LifecycleReport> reports;    // canonical (config, seed) order
    std::vector<MatrixRun> execution_order;  // order the runs actually started in
};

struct MatrixOptions {
    Seed shuffle_seed = 0;
    std::size_t jobs = 1;  // parallel runs; forced to 1 with process-global meters
    LifecycleHooks hooks;
};

/// The execution order of the (config x seed) grid is a deterministic shuffle.
std::vector<MatrixRun> shuffled_schedule(std::size_t n_configs, std::span<const Seed> seeds, Seed shuffle_seed);

MatrixResult run_experiment_matrix(const BatchStream& stream, std::span<const SimulationConfig> configs,
                                   std::span<const Seed> seeds, const MatrixOptions& options = {});

}  // namespace greenretrain

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
#include "greenretrain/lifecycle.hpp"

#include <numeric>

#include "greenretrain/errors.hpp"
#include "greenretrain/forest.hpp"
#include "greenretrain/metrics.hpp"

namespace greenretrain {

SimulationConfig make_simulation_config(std::string_view name, const LifecycleSettings& settings, Seed seed) {
    const auto shape = parse_configuration_name(name);
    SimulationConfig c;
    c.name = std::string(name);
    c.trigger.kind = shape.trigger;
    if (shape.method) {
        c.trigger.detector = settings.detector;
        c.trigger.detector->method = *shape.method;
    }
    c.window.kind = shape.window;
    c.window.window_periods = shape.window == WindowKind::kSlidingWindow ? settings.window_periods : 0;
    c.search = settings.search;
    c.downsample_ratio = settings.downsample_ratio;
    c.meter = settings.meter;
    c.seed = seed;
    return c;
}

void validate(const SimulationConfig& config) {
    const auto shape = parse_configuration_name(config.name);
    require(shape.trigger == config.trigger.kind, ErrorKind::kConfiguration,
            "configuration '" + config.name + "' does not match its trigger");
    if (config.trigger.kind != TriggerKind::kStatic)
        require(shape.window == config.window.kind, ErrorKind::kConfiguration,
                "configuration '" + config.name + "' does not match its window policy");
    if (shape.method)
        require(config.trigger.detector && config.trigger.detector->method == *shape.method,
                ErrorKind::kConfiguration, "configuration '" + config.name + "' does not match its detector");
    validate(config.trigger);
    validate(config.search);
    if (config.downsample_ratio)
        require(*config.downsample_ratio >= 1, ErrorKind::kConfiguration, "downsample ratio must be 1:k with k >= 1");
}

namespace {

struct DeployedModel {
    ScalerParams scaler;
    std::optional<TrainedForest> model;
    std::size_t train_rows = 0;
    std::size_t first_period = 0;
    std::size_t last_period = 0;
};

class LifecycleRun {
public:
    LifecycleRun(const SimulationConfig& config, EnergyMeter& meter, EnergyLedger& ledger)
        : config_(config), meter_(meter), ledger_(ledger) {}

    // Scaling and downsampling are bookkeeping and stay outside the measured scopes.
    DeployedModel train(const TrainingWindow& window, std::size_t ledger_period, double& joules) {
        auto data = window.combined();
        DeployedModel d;
        d.scaler = fit_scaler(data.features);
        data.features = apply_scaler(d.scaler, data.features);
        if (config_.downsample_ratio)
            data = downsample(data, *config_.downsample_ratio, derive_seed(config_.seed, {ledger_period, 1}));
        const auto rows = static_cast<double>(data.size());

        const MeasurementScope tuning(SubPhase::kTuning);
        auto searched = measure_scope(meter_, tuning, rows * static_cast<double>(config_.search.n_candidates), [&] {
            return randomized_search(data, config_.search, derive_seed(config_.seed, {ledger_period, 2}));
        });
        ledger_.add(ledger_period, tuning, searched.joules);

        // The virtual cost of a training action is rows x candidates; the refit is part of it.
        const MeasurementScope fit(SubPhase::kFit);
        auto fitted = measure_scope(meter_, fit, 0.0, [&] {
            return train_forest(data, searched.value.best, derive_seed(config_.seed, {ledger_period, 3}));
        });
        ledger_.add(ledger_period, fit, fitted.joules);

        joules = searched.joules + fitted.joules;
        d.model = std::move(fitted.value);
        d.train_rows = data.size();
        d.first_period = window.first_period();
        d.last_period = window.last_period();
        return d;
    }

    template <class F>
    auto measured(SubPhase sub, double units, std::size_t period, double& joules, F&& action) {
        const MeasurementScope scope(sub);
        auto m = measure_scope(meter_, scope, units, std::forward<F>(action));
        ledger_.add(period, scope, m.joules);
        joules += m.joules;
        return std::move(m.value);
    }

private:
    const SimulationConfig& config_;
    EnergyMeter& meter_;
    EnergyLedger& ledger_;
};

}  // namespace

LifecycleReport run_lifecycle(const BatchStream& stream, const SimulationConfig& input_config,
                              const LifecycleHooks& hooks) {
    validate(input_config);
    auto [train_portion, eval_portion] = split_initial(stream);

    SimulationConfig config = input_config;
    if (config.window.kind == WindowKind::kSlidingWindow && config.window.window_periods == 0)
        config.window.window_periods = train_portion.size();

    std::unique_ptr<EnergyMeter> owned_meter;
    EnergyMeter* meter = hooks.meter;
    if (!meter) {
        owned_meter = make_meter(config.meter);
        meter = owned_meter.get();
    }

    LifecycleReport report;
    report.config = config;
    report.stream_fingerprint = fingerprint(stream);
    report.training_periods = train_portion.size();
    report.ledger = EnergyLedger(config.name, config.seed);

    // Static never retrains, so its window policy is irrelevant; it trains on the whole first half.
    const WindowPolicy policy =
        config.trigger.kind == TriggerKind::kStatic ? WindowPolicy{WindowKind::kFullHistory, 0} : config.window;
    TrainingWindow window(policy);
    for (auto& b : train_portion) window = update_window(std::move(window), std::move(b));

    LifecycleRun run(config, *meter, report.ledger);
    double initial_joules = 0.0;
    DeployedModel deployed = run.train(window, window.last_period(), initial_joules);
    report.initial_train_rows = deployed.train_rows;

    const bool informed = config.trigger.kind == TriggerKind::kInformed;
    for (std::size_t e = 0; e < eval_portion.size(); ++e) {
        auto& batch = eval_portion[e];
        const auto period = batch.period;
        PeriodRecord rec;
        rec.period = period;

        std::optional<DriftVerdict> verdict;
        if (informed) {
            const auto window_x = apply_scaler(deployed.scaler, window.combined().features);
            const auto incoming_x = apply_scaler(deployed.scaler, batch.features);
            const auto& importances = deployed.model->importances();
            if (hooks.detector) {
                verdict = run.measured(SubPhase::kStatTest, 0.0, period, rec.detect_j,
                                       [&] { return hooks.detector(window_x, incoming_x, importances); });
            } else {
                auto cfg = *config.trigger.detector;
                cfg.seed = derive_seed(config.seed, {period, 4});
                const auto windows = subsample_windows(cfg, window_x, incoming_x);
                const auto rows = static_cast<double>(windows.reference.rows() + windows.incoming.rows());
                // Virtual detect cost is rows x dimensions tested, all charged to distribution estimation.
                auto reduced = windows;
                if (cfg.method != DetectorMethod::kKsAll)
                    reduced = run.measured(SubPhase::kReduction, 0.0, period, rec.detect_j,
                                           [&] { return reduce_dimensions(cfg, windows, importances); });
                const auto dims = static_cast<double>(reduced.reference.cols());
                const auto distributions = run.measured(SubPhase::kDistEstimation, rows * dims, period, rec.detect_j,
                                                        [&] { return estimate_distributions(reduced); });
                verdict = run.measured(SubPhase::kStatTest, 0.0, period, rec.detect_j,
                                       [&] { return test_distributions(cfg, distributions); });
            }
            rec.drift_detected = verdict->drift;
        }

        if (should_retrain(config.trigger, e, verdict ? &*verdict : nullptr)) {
            // The window holds data through period - 1 only.
            deployed = run.train(window, period, rec.train_j);
            rec.retrained = true;
            ++report.retrain_count;
        }

        const auto scaled = apply_scaler(deployed.scaler, batch.features);
        const auto scores = run.measured(SubPhase::kPredict, static_cast<double>(batch.size()), period, rec.infer_j,
                                         [&] { return predict_proba(*deployed.model, scaled); });
        const auto pos = batch.positives();
        if (pos > 0 && pos < batch.size()) {
            rec.roc_auc = roc_auc(scores, batch.labels);
        } else {
            report.warnings.push_back("period " + std::to_string(period) +
                                      " holds a single class; ROC AUC undefined and excluded from the mean");
        }
        // Guarantees a ledger record for every evaluation period, even one with zero energy.
        report.ledger.add(period, Phase::kInfer, 0.0);

        rec.train_rows = deployed.train_rows;
        rec.model_first_period = deployed.first_period;
        rec.model_last_period = deployed.last_period;
        report.records.push_back(rec);

        window = update_window(std::move(window), std::move(batch));
    }

    double sum = 0.0;
    std::size_t defined = 0;
    for (const auto& r : report.records)
        if (r.roc_auc) {
            sum += *r.roc_auc;
            ++defined;
        }
    if (defined > 0) report.mean_roc_auc = sum / static_cast<double>(defined);
    report.final_importances = deployed.model->importances();
    return report;
}

}  // namespace greenretrain

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
#include <cmath>
#include <string>

#include "greenretrain/dataset.hpp"
#include "greenretrain/errors.hpp"

namespace greenretrain {

void validate(const SyntheticDriftSpec& spec) {
    require(spec.n_features >= 1, ErrorKind::kConfiguration, "n_features must be >= 1");
    require(spec.n_periods >= 1, ErrorKind::kConfiguration, "n_periods must be >= 1");
    require(spec.samples_per_period >= 1, ErrorKind::kConfiguration, "samples_per_period must be >= 1");
    require(spec.failure_rate > 0.0 && spec.failure_rate < 1.0, ErrorKind::kConfiguration,
            "failure_rate must lie in (0, 1)");
    require(std::isfinite(spec.signal_weight), ErrorKind::kConfiguration, "signal_weight must be finite");
    for (const auto& e : spec.drift_events) {
        require(e.period >= 1 && e.period < spec.n_periods, ErrorKind::kConfiguration,
                "drift period " + std::to_string(e.period) + " outside [1, n_periods)");
        require(e.feature < spec.n_features, ErrorKind::kConfiguration,
                "drift feature " + std::to_string(e.feature) + " out of range");
        require(std::isfinite(e.mean_shift_sigmas), ErrorKind::kConfiguration, "drift shift must be finite");
    }
    for (auto f : spec.label_signal_features)
        require(f < spec.n_features, ErrorKind::kConfiguration, "signal feature " + std::to_string(f) + " out of range");
}

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// E[sigmoid(b + s*Z)] for Z ~ N(0,1), by trapezoid quadrature on [-10, 10].
double expected_rate(double b, double s) {
    constexpr int kSteps = 4000;
    constexpr double kLo = -10.0, kHi = 10.0;
    const double h = (kHi - kLo) / kSteps;
    double acc = 0.0;
    for (int i = 0; i <= kSteps; ++i) {
        const double z = kLo + h * i;
        const double w = (i == 0 || i == kSteps) ? 0.5 : 1.0;
        acc += w * sigmoid(b + s * z) * std::exp(-0.5 * z * z);
    }
    return acc * h / std::sqrt(2.0 * M_PI);
}

// Intercept that makes the marginal positive rate equal `rate`.
double calibrate_intercept(double rate, double s) {
    double lo = -50.0, hi = 50.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (expected_rate(mid, s) < rate ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

BatchStream generate_synthetic_stream(const SyntheticDriftSpec& spec) {
    validate(spec);
    const std::size_t d = spec.n_features;
    Rng rng(spec.seed);

    std::vector<double> base_mean(d), sigma(d);
    std::uniform_real_distribution<double> mean_dist(-1.0, 1.0), sigma_dist(0.5, 2.0);
    for (std::size_t f = 0; f < d; ++f) {
        base_mean[f] = mean_dist(rng);
        sigma[f] = sigma_dist(rng);
    }

    const double spread = std::abs(spec.signal_weight) * std::sqrt(static_cast<double>(spec.label_signal_features.size()));
    const double intercept = calibrate_intercept(spec.failure_rate, spread);

    std::vector<std::string> names;
    for (std::size_t f = 0; f < d; ++f) names.push_back("f" + std::to_string(f));

    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::vector<LabeledBatch> batches;
    batches.reserve(spec.n_periods);
    for (std::size_t t = 0; t < spec.n_periods; ++t) {
        std::vector<double> mean = base_mean;
        for (const auto& e : spec.drift_events)
            if (e.period <= t) mean[e.feature] += e.mean_shift_sigmas * sigma[e.feature];

        LabeledBatch b;
        b.period = t;
        std::vector<double> values(spec.samples_per_period * d);
        b.labels.resize(spec.samples_per_period);
        for (std::size_t i = 0; i < spec.samples_per_period; ++i) {
            double* row = values.data() + i * d;
            for (std::size_t f = 0; f < d; ++f) row[f] = mean[f] + sigma[f] * gauss(rng);
            double logit = intercept;
            for (auto s : spec.label_signal_features) logit += spec.signal_weight * (row[s] - mean[s]) / sigma[s];
            b.labels[i] = unit(rng) < sigmoid(logit) ? 1 : 0;
        }
        b.features = FeatureMatrix(spec.samples_per_period, names, std::move(values));
        batches.push_back(std::move(b));
    }
    return BatchStream(std::move(batches));
}

}  // namespace greenretrain

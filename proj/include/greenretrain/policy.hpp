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

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "greenretrain/dataset.hpp"
#include "greenretrain/detector.hpp"

namespace greenretrain {

enum class TriggerKind { kStatic, kPeriodic, kInformed };

struct RetrainTrigger {
    TriggerKind kind = TriggerKind::kStatic;
    std::optional<DetectorConfig> detector;  // present iff kind == kInformed

    friend bool operator==(const RetrainTrigger&, const RetrainTrigger&) = default;
};

void validate(const RetrainTrigger& trigger);

enum class WindowKind { kSlidingWindow, kFullHistory };

struct WindowPolicy {
    WindowKind kind = WindowKind::kFullHistory;
    std::size_t window_periods = 0;  // used only by the sliding window

    friend bool operator==(const WindowPolicy&, const WindowPolicy&) = default;
};

void validate(const WindowPolicy& policy);

/// Batches currently eligible for training.
class TrainingWindow {
public:
    explicit TrainingWindow(WindowPolicy policy);

    const WindowPolicy& policy() const noexcept { return policy_; }
    const std::vector<LabeledBatch>& batches() const noexcept { return batches_; }
    bool empty() const noexcept { return batches_.empty(); }
    std::size_t total_rows() const noexcept;
    std::size_t first_period() const;
    std::size_t last_period() const;

    /// Single batch holding every row in the window.
    LabeledBatch combined() const;

private:
    friend TrainingWindow update_window(TrainingWindow window, LabeledBatch new_batch);

    WindowPolicy policy_;
    std::vector<LabeledBatch> batches_;
};

/// Full history appends; the sliding window appends then drops the oldest batches
/// until at most window_periods remain.
TrainingWindow update_window(TrainingWindow window, LabeledBatch new_batch);

/// `evaluation_index` counts evaluation periods from 0. No trigger retrains before
/// the first evaluation period: the window still equals the initial training data.
bool should_retrain(const RetrainTrigger& trigger, std::size_t evaluation_index, const DriftVerdict* verdict);

/// Canonical configuration names.
inline constexpr std::array<std::string_view, 9> kConfigurationNames{
    "static", "periodic_sw", "periodic_fh", "ks_all_sw", "ks_all_fh", "ks_pca_sw", "ks_pca_fh", "ks_fi_sw", "ks_fi_fh"};

struct ConfigurationShape {
    TriggerKind trigger = TriggerKind::kStatic;
    std::optional<DetectorMethod> method;
    WindowKind window = WindowKind::kFullHistory;
};

ConfigurationShape parse_configuration_name(std::string_view name);
std::string configuration_name(TriggerKind trigger, std::optional<DetectorMethod> method, WindowKind window);

}  // namespace greenretrain

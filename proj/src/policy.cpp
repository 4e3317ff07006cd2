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
#include "greenretrain/policy.hpp"

#include "greenretrain/errors.hpp"

namespace greenretrain {

void validate(const RetrainTrigger& trigger) {
    if (trigger.kind == TriggerKind::kInformed) {
        require(trigger.detector.has_value(), ErrorKind::kConfiguration, "informed trigger needs a detector");
        validate(*trigger.detector);
    } else {
        require(!trigger.detector.has_value(), ErrorKind::kConfiguration,
                "only informed triggers carry a detector");
    }
}

void validate(const WindowPolicy& policy) {
    if (policy.kind == WindowKind::kSlidingWindow)
        require(policy.window_periods >= 1, ErrorKind::kConfiguration, "sliding window needs window_periods >= 1");
}

TrainingWindow::TrainingWindow(WindowPolicy policy) : policy_(policy) { validate(policy_); }

std::size_t TrainingWindow::total_rows() const noexcept {
    std::size_t n = 0;
    for (const auto& b : batches_) n += b.size();
    return n;
}

std::size_t TrainingWindow::first_period() const {
    require(!batches_.empty(), ErrorKind::kInsufficientData, "training window is empty");
    return batches_.front().period;
}

std::size_t TrainingWindow::last_period() const {
    require(!batches_.empty(), ErrorKind::kInsufficientData, "training window is empty");
    return batches_.back().period;
}

LabeledBatch TrainingWindow::combined() const { return concatenate(batches_); }

TrainingWindow update_window(TrainingWindow window, LabeledBatch new_batch) {
    if (!window.batches_.empty())
        require(new_batch.period > window.batches_.back().period, ErrorKind::kSequencing,
                "period " + std::to_string(new_batch.period) + " arrives after period " +
                    std::to_string(window.batches_.back().period));
    window.batches_.push_back(std::move(new_batch));
    if (window.policy_.kind == WindowKind::kSlidingWindow && window.batches_.size() > window.policy_.window_periods) {
        const auto excess = window.batches_.size() - window.policy_.window_periods;
        window.batches_.erase(window.batches_.begin(), window.batches_.begin() + static_cast<std::ptrdiff_t>(excess));
    }
    return window;
}

bool should_retrain(const RetrainTrigger& trigger, std::size_t evaluation_index, const DriftVerdict* verdict) {
    switch (trigger.kind) {
        case TriggerKind::kStatic:
            return false;
        case TriggerKind::kPeriodic:
            return evaluation_index > 0;
        case TriggerKind::kInformed:
            require(verdict != nullptr, ErrorKind::kConfiguration, "informed trigger needs a drift verdict");
            return evaluation_index > 0 && verdict->drift;
    }
    return false;
}

ConfigurationShape parse_configuration_name(std::string_view name) {
    if (name == "static") return {TriggerKind::kStatic, std::nullopt, WindowKind::kFullHistory};

    ConfigurationShape shape;
    std::string_view stem;
    if (name.ends_with("_sw")) {
        shape.window = WindowKind::kSlidingWindow;
        stem = name.substr(0, name.size() - 3);
    } else if (name.ends_with("_fh")) {
        shape.window = WindowKind::kFullHistory;
        stem = name.substr(0, name.size() - 3);
    } else {
        fail(ErrorKind::kConfiguration, "unknown configuration '" + std::string(name) + "'");
    }
    if (stem == "periodic") {
        shape.trigger = TriggerKind::kPeriodic;
    } else if (stem == "ks_all" || stem == "ks_pca" || stem == "ks_fi") {
        shape.trigger = TriggerKind::kInformed;
        shape.method = parse_detector_method(std::string(stem));
    } else {
        fail(ErrorKind::kConfiguration, "unknown configuration '" + std::string(name) + "'");
    }
    return shape;
}

std::string configuration_name(TriggerKind trigger, std::optional<DetectorMethod> method, WindowKind window) {
    if (trigger == TriggerKind::kStatic) return "static";
    const std::string suffix = window == WindowKind::kSlidingWindow ? "_sw" : "_fh";
    if (trigger == TriggerKind::kPeriodic) return "periodic" + suffix;
    require(method.has_value(), ErrorKind::kConfiguration, "informed configuration needs a detector method");
    return to_string(*method) + suffix;
}

}  // namespace greenretrain

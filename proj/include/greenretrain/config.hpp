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
#include <vector>

#include "greenretrain/dataset.hpp"
#include "greenretrain/lifecycle.hpp"

namespace greenretrain {

/// Contents of a `simulate` config file. Sections: [experiment], [detector], [search], [meter].
struct ExperimentConfig {
    std::vector<std::string> configurations;  // canonical names, file order
    LifecycleSettings settings;
    std::size_t n_seeds = 5;
    Seed shuffle_seed = 0;
    std::optional<StreamSpan> span;
};

ExperimentConfig parse_experiment_config(const std::string& text);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// Synthetic stream spec. Sections: [stream], [drift] with `events = period:feature:sigmas, ...`.
SyntheticDriftSpec parse_synthetic_spec(const std::string& text);
SyntheticDriftSpec load_synthetic_spec(const std::filesystem::path& path);

}  // namespace greenretrain

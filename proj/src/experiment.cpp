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
#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <set>
#include <thread>

#include "greenretrain/errors.hpp"
#include "greenretrain/lifecycle.hpp"

namespace greenretrain {

std::vector<MatrixRun> shuffled_schedule(std::size_t n_configs, std::span<const Seed> seeds, Seed shuffle_seed) {
    std::vector<MatrixRun> runs;
    for (std::size_t c = 0; c < n_configs; ++c)
        for (auto s : seeds) runs.push_back({c, s});
    Rng rng(shuffle_seed);
    std::shuffle(runs.begin(), runs.end(), rng);
    return runs;
}

MatrixResult run_experiment_matrix(const BatchStream& stream, std::span<const SimulationConfig> configs,
                                   std::span<const Seed> seeds, const MatrixOptions& options) {
    require(!configs.empty(), ErrorKind::kValidation, "experiment needs at least one configuration");
    require(!seeds.empty(), ErrorKind::kValidation, "experiment needs at least one seed");
    std::set<std::pair<std::string, Seed>> seen;
    for (const auto& c : configs) {
        validate(c);
        for (auto s : seeds)
            require(seen.emplace(c.name, s).second, ErrorKind::kValidation,
                    "duplicate run (" + c.name + ", seed " + std::to_string(s) + ")");
    }

    MatrixResult result;
    result.execution_order = shuffled_schedule(configs.size(), seeds, options.shuffle_seed);
    result.reports.resize(configs.size() * seeds.size());

    auto slot = [&](const MatrixRun& run) {
        const auto s = static_cast<std::size_t>(std::find(seeds.begin(), seeds.end(), run.seed) - seeds.begin());
        return run.config_index * seeds.size() + s;
    };
    auto execute = [&](const MatrixRun& run) {
        auto config = configs[run.config_index];
        config.seed = run.seed;
        result.reports[slot(run)] = run_lifecycle(stream, config, options.hooks);
    };

    bool serial = options.jobs <= 1 || options.hooks.meter != nullptr;
    for (const auto& c : configs) serial = serial || meter_is_process_global(c.meter.kind);

    if (serial) {
        for (const auto& run : result.execution_order) execute(run);
        return result;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    {
        std::vector<std::jthread> workers;
        for (std::size_t w = 0; w < std::min(options.jobs, result.execution_order.size()); ++w) {
            workers.emplace_back([&] {
                for (std::size_t i = next++; i < result.execution_order.size(); i = next++) {
                    try {
                        execute(result.execution_order[i]);
                    } catch (...) {
                        std::lock_guard lock(error_mutex);
                        if (!first_error) first_error = std::current_exception();
                    }
                }
            });
        }
    }
    if (first_error) std::rethrow_exception(first_error);
    return result;
}

}  // namespace greenretrain

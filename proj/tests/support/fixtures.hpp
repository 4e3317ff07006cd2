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

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "greenretrain/dataset.hpp"

namespace fixtures {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("greenretrain_" + tag + "_" + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path file(const std::string& name, const std::string& content) const {
        const auto p = path_ / name;
        std::ofstream(p, std::ios::binary) << content;
        return p;
    }

private:
    std::filesystem::path path_;
};

inline std::vector<std::string> names(std::size_t d) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < d; ++i) out.push_back("f" + std::to_string(i));
    return out;
}

/// Rows of i.i.d. N(mean, 1) in every column; `shift` is added to column `shifted`.
inline greenretrain::FeatureMatrix gaussian(std::size_t rows, std::size_t d, std::uint64_t seed,
                                            std::size_t shifted = 0, double shift = 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z;
    greenretrain::FeatureMatrix m(rows, names(d));
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < d; ++c) m(r, c) = z(rng) + (c == shifted ? shift : 0.0);
    return m;
}

inline greenretrain::LabeledBatch batch(std::size_t period, greenretrain::FeatureMatrix x,
                                        std::vector<std::uint8_t> y) {
    return greenretrain::LabeledBatch{period, std::move(x), std::move(y)};
}

/// Labels 1 exactly when column `signal` exceeds `cut`.
inline greenretrain::LabeledBatch threshold_batch(std::size_t period, std::size_t rows, std::size_t d,
                                                  std::uint64_t seed, std::size_t signal = 0, double cut = 0.8) {
    auto x = gaussian(rows, d, seed);
    std::vector<std::uint8_t> y(rows);
    for (std::size_t r = 0; r < rows; ++r) y[r] = x(r, signal) > cut ? 1 : 0;
    return batch(period, std::move(x), std::move(y));
}

inline greenretrain::SyntheticDriftSpec small_stream_spec(std::size_t periods = 8, std::size_t samples = 300,
                                                          std::uint64_t seed = 11) {
    greenretrain::SyntheticDriftSpec s;
    s.n_features = 6;
    s.n_periods = periods;
    s.samples_per_period = samples;
    s.failure_rate = 0.2;
    s.label_signal_features = {0, 1};
    s.drift_events = {{periods / 2 + 1, 0, 3.0}};
    s.seed = seed;
    return s;
}

}  // namespace fixtures

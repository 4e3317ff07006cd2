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
#include <span>
#include <vector>

namespace greenretrain {

struct WilcoxonResult {
    double statistic = 0.0;  // min(W+, W-)
    double p_value = 1.0;    // two-sided
    std::size_t n_used = 0;  // nonzero differences
    bool exact = false;
};

inline constexpr std::size_t kWilcoxonExactLimit = 12;

/// Paired signed-rank test on a - b. Zero differences are dropped and tied
/// magnitudes share average ranks. The null distribution is enumerated exactly for
/// n <= 12; larger n use the tie- and continuity-corrected normal approximation.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b);

/// Linear-interpolation quantile (q in [0, 1]) of a non-empty sample.
double quantile(std::vector<double> values, double q);
double median(std::vector<double> values);
double interquartile_range(const std::vector<double>& values);

}  // namespace greenretrain

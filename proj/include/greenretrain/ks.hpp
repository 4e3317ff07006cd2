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

namespace greenretrain {

/// Two-sample Kolmogorov-Smirnov statistic sup_x |F_a(x) - F_b(x)|.
double ks_statistic(std::span<const double> a, std::span<const double> b);

/// Same as ks_statistic, for inputs already sorted ascending.
double ks_statistic_sorted(std::span<const double> a, std::span<const double> b);

/// Asymptotic two-sample p-value: 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2),
/// lambda = D sqrt(mn/(m+n)); the series stops once terms fall below 1e-12. Below
/// lambda = 1.18 the equivalent theta-function form 1 - sqrt(2 pi)/lambda sum_j
/// exp(-(2j-1)^2 pi^2 / (8 lambda^2)) is summed instead.
double ks_pvalue(double d, std::size_t m, std::size_t n);

}  // namespace greenretrain

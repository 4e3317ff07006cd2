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
#include "greenretrain/ks.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "greenretrain/errors.hpp"

namespace greenretrain {

namespace {
constexpr double kSeriesSwitch = 1.18;
}  // namespace

double ks_statistic_sorted(std::span<const double> a, std::span<const double> b) {
    require(!a.empty() && !b.empty(), ErrorKind::kInsufficientData, "KS test needs two non-empty samples");
    const auto m = static_cast<double>(a.size()), n = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        // Step past every copy of the smallest pending value in both samples before comparing CDFs.
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == x) ++i;
        while (j < b.size() && b[j] == x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / m - static_cast<double>(j) / n));
    }
    return d;
}

double ks_statistic(std::span<const double> a, std::span<const double> b) {
    std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    return ks_statistic_sorted(sa, sb);
}

double ks_pvalue(double d, std::size_t m, std::size_t n) {
    require(m >= 1 && n >= 1, ErrorKind::kInsufficientData, "KS p-value needs non-empty samples");
    require(d >= 0.0 && d <= 1.0, ErrorKind::kValidation, "KS statistic must lie in [0, 1]");
    const double mm = static_cast<double>(m), nn = static_cast<double>(n);
    const double lambda = d * std::sqrt(mm * nn / (mm + nn));
    if (lambda == 0.0) return 1.0;
    const double l2 = lambda * lambda;
    if (lambda < kSeriesSwitch) {
        // Jacobi-transformed form of the same function: the alternating series converges
        // too slowly here and its truncation noise breaks monotonicity near p = 1.
        const double pi = std::numbers::pi;
        double sum = 0.0;
        for (int j = 1; j < 1000; ++j) {
            const double odd = 2.0 * j - 1.0;
            const double term = std::exp(-odd * odd * pi * pi / (8.0 * l2));
            sum += term;
            if (term < 1e-17 * sum || term == 0.0) break;
        }
        return std::clamp(1.0 - std::sqrt(2.0 * pi) / lambda * sum, 0.0, 1.0);
    }
    double sum = 0.0;
    for (int k = 1; k < 100000; ++k) {
        const double term = std::exp(-2.0 * k * k * l2);
        sum += (k % 2 == 1) ? term : -term;
        if (term < 1e-12) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

}  // namespace greenretrain

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
#include "greenretrain/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "greenretrain/errors.hpp"

namespace greenretrain {

namespace {

struct SignedRanks {
    std::vector<std::uint64_t> doubled;  // 2 * rank, integral even with ties
    std::vector<bool> positive;
    std::vector<std::size_t> tie_sizes;
};

SignedRanks rank_differences(const std::vector<double>& diffs) {
    const auto n = diffs.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](auto x, auto y) { return std::abs(diffs[x]) < std::abs(diffs[y]); });
    SignedRanks r{std::vector<std::uint64_t>(n), std::vector<bool>(n), {}};
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i + 1;
        while (j < n && std::abs(diffs[idx[j]]) == std::abs(diffs[idx[i]])) ++j;
        for (std::size_t k = i; k < j; ++k) r.doubled[idx[k]] = (i + 1) + j;
        r.tie_sizes.push_back(j - i);
        i = j;
    }
    for (std::size_t i = 0; i < n; ++i) r.positive[i] = diffs[i] > 0.0;
    return r;
}

}  // namespace

WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b) {
    require(a.size() == b.size(), ErrorKind::kSchema, "paired samples differ in length");
    std::vector<double> diffs;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        require(std::isfinite(d), ErrorKind::kValidation, "paired samples must be finite");
        if (d != 0.0) diffs.push_back(d);
    }
    const auto n = diffs.size();
    require(n >= 5, ErrorKind::kInsufficientData,
            "Wilcoxon test needs at least 5 nonzero differences, got " + std::to_string(n));

    const auto ranks = rank_differences(diffs);
    const std::uint64_t total = std::accumulate(ranks.doubled.begin(), ranks.doubled.end(), std::uint64_t{0});
    std::uint64_t w_plus = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (ranks.positive[i]) w_plus += ranks.doubled[i];
    const std::uint64_t w_min = std::min(w_plus, total - w_plus);

    WilcoxonResult result;
    result.n_used = n;
    result.statistic = static_cast<double>(w_min) / 2.0;

    if (n <= kWilcoxonExactLimit) {
        // Null distribution of doubled W+ by subset-sum counting over the 2^n sign patterns.
        std::vector<std::uint64_t> ways(total + 1, 0);
        ways[0] = 1;
        for (auto r : ranks.doubled)
            for (std::uint64_t s = total; s >= r; --s) {
                ways[s] += ways[s - r];
                if (s == r) break;
            }
        std::uint64_t at_most = 0;
        for (std::uint64_t s = 0; s <= w_min; ++s) at_most += ways[s];
        const double patterns = static_cast<double>(std::uint64_t{1} << n);
        result.p_value = std::min(1.0, 2.0 * static_cast<double>(at_most) / patterns);
        result.exact = true;
        return result;
    }

    const double nn = static_cast<double>(n);
    double tie_term = 0.0;
    for (auto t : ranks.tie_sizes) {
        const double tt = static_cast<double>(t);
        tie_term += tt * tt * tt - tt;
    }
    const double mean = nn * (nn + 1.0) / 4.0;
    const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term / 48.0;
    const double w = static_cast<double>(w_plus) / 2.0;
    if (var <= 0.0) {
        result.p_value = 1.0;
        return result;
    }
    const double dev = std::max(0.0, std::abs(w - mean) - 0.5);
    result.p_value = std::clamp(std::erfc(dev / std::sqrt(var) / std::sqrt(2.0)), 0.0, 1.0);
    return result;
}

double quantile(std::vector<double> values, double q) {
    require(!values.empty(), ErrorKind::kInsufficientData, "quantile of an empty sample");
    require(q >= 0.0 && q <= 1.0, ErrorKind::kValidation, "quantile level must lie in [0, 1]");
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    // Weighted form keeps the median of a negated sample exactly the negated median.
    return (1.0 - frac) * values[lo] + frac * values[hi];
}

double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

double interquartile_range(const std::vector<double>& values) {
    return quantile(values, 0.75) - quantile(values, 0.25);
}

}  // namespace greenretrain

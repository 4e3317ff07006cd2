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
#include "greenretrain/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include "greenretrain/errors.hpp"

namespace greenretrain {

double roc_auc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
    require(scores.size() == labels.size(), ErrorKind::kSchema, "scores and labels differ in length");
    const auto n = scores.size();
    std::uint64_t n_pos = 0;
    for (auto y : labels) {
        require(y <= 1, ErrorKind::kValidation, "labels must be 0 or 1");
        n_pos += y;
    }
    const std::uint64_t n_neg = n - n_pos;
    require(n_pos > 0 && n_neg > 0, ErrorKind::kUndefinedMetric, "ROC AUC needs both classes");

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Twice the positive rank sum; tied groups share the average rank, so doubled ranks stay integral.
    std::uint64_t doubled_rank_sum = 0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i + 1;
        while (j < n && scores[idx[j]] == scores[idx[i]]) ++j;
        const std::uint64_t doubled_rank = (i + 1) + j;  // 2 * average of ranks i+1..j
        for (std::size_t k = i; k < j; ++k)
            if (labels[idx[k]]) doubled_rank_sum += doubled_rank;
        i = j;
    }
    const std::uint64_t doubled_u = doubled_rank_sum - n_pos * (n_pos + 1);
    return static_cast<double>(doubled_u) / (2.0 * static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

}  // namespace greenretrain

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
#include <span>

namespace greenretrain {

/// P(score_pos > score_neg) + 0.5 P(score_pos == score_neg), via average ranks.
double roc_auc(std::span<const double> scores, std::span<const std::uint8_t> labels);

}  // namespace greenretrain

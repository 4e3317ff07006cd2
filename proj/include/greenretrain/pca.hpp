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
#include <vector>

#include <Eigen/Dense>

#include "greenretrain/dataset.hpp"

namespace greenretrain {

struct PcaProjection {
    Eigen::MatrixXd components;              // k x d, orthonormal rows
    std::vector<double> explained_variance;  // all d eigenvalues, non-increasing
    std::vector<double> center;
    std::size_t k = 0;

    /// Fraction of total variance carried by the first k components.
    double retained_fraction() const;
};

/// Keeps the smallest k whose cumulative explained-variance fraction reaches
/// `variance_retained`. Eigenvalues below 1e-12 of the largest count as zero.
PcaProjection fit_pca(const FeatureMatrix& reference, double variance_retained);

/// (data - center) * components^T, one column per retained component.
FeatureMatrix project(const PcaProjection& pca, const FeatureMatrix& data);

}  // namespace greenretrain

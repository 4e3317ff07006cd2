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
#include "greenretrain/pca.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "greenretrain/errors.hpp"

namespace greenretrain {

double PcaProjection::retained_fraction() const {
    const double total = std::accumulate(explained_variance.begin(), explained_variance.end(), 0.0);
    if (total <= 0.0) return 1.0;
    return std::accumulate(explained_variance.begin(), explained_variance.begin() + static_cast<std::ptrdiff_t>(k), 0.0) /
           total;
}

PcaProjection fit_pca(const FeatureMatrix& reference, double variance_retained) {
    require(reference.rows() >= 2, ErrorKind::kInsufficientData, "PCA needs at least 2 rows");
    require(variance_retained > 0.0 && variance_retained <= 1.0, ErrorKind::kConfiguration,
            "variance_retained must lie in (0, 1]");
    const auto n = reference.rows(), d = reference.cols();

    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> x(
        reference.values().data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    const Eigen::RowVectorXd mean = x.colwise().mean();
    const Eigen::MatrixXd centered = x.rowwise() - mean;
    const Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n - 1);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    require(solver.info() == Eigen::Success, ErrorKind::kInsufficientData, "covariance eigendecomposition failed");
    // Eigen returns ascending eigenvalues; reverse to descending.
    const Eigen::VectorXd values = solver.eigenvalues().reverse();
    const Eigen::MatrixXd vectors = solver.eigenvectors().rowwise().reverse();

    PcaProjection p;
    p.center.assign(mean.data(), mean.data() + d);
    const double largest = std::max(values(0), 0.0);
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        double v = values(i);
        if (v <= 1e-12 * largest) v = 0.0;
        p.explained_variance.push_back(v);
    }
    const double total = std::accumulate(p.explained_variance.begin(), p.explained_variance.end(), 0.0);

    std::size_t k = 0;
    if (total > 0.0) {
        double cumulative = 0.0;
        while (k < d) {
            cumulative += p.explained_variance[k];
            ++k;
            if (cumulative / total >= variance_retained - 1e-12) break;
        }
    } else {
        k = 1;  // degenerate: constant data still projects onto one (all-zero) axis
    }
    p.k = std::min({k, d, n});
    p.components = vectors.leftCols(static_cast<Eigen::Index>(p.k)).transpose();
    return p;
}

FeatureMatrix project(const PcaProjection& pca, const FeatureMatrix& data) {
    require(data.cols() == pca.center.size(), ErrorKind::kSchema,
            "PCA fitted on " + std::to_string(pca.center.size()) + " features, data has " + std::to_string(data.cols()));
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> x(
        data.values().data(), static_cast<Eigen::Index>(data.rows()), static_cast<Eigen::Index>(data.cols()));
    Eigen::Map<const Eigen::RowVectorXd> center(pca.center.data(), static_cast<Eigen::Index>(pca.center.size()));
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> projected =
        (x.rowwise() - center) * pca.components.transpose();

    std::vector<std::string> names;
    for (std::size_t i = 0; i < pca.k; ++i) names.push_back("pc" + std::to_string(i));
    return FeatureMatrix(data.rows(), std::move(names),
                         std::vector<double>(projected.data(), projected.data() + projected.size()));
}

}  // namespace greenretrain

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "flowsense/matrix.hpp"

#include <json.hpp>

namespace flowsense {

// Eigendecomposition result for a symmetric matrix: eigenvalues sorted
// nonincreasing, eigenvectors as matching columns.
struct EigenDecomposition {
    std::vector<double> values;
    Matrix vectors; // p x p, column i pairs with values[i]
};

// Cyclic Jacobi rotations; adequate for the few-hundred-column matrices this
// pipeline produces. Off-diagonal mass is driven below 1e-14 * frobenius.
EigenDecomposition eigen_symmetric(const Matrix& symmetric);

// Principal component model fitted on the population covariance
// (1/m) * sum (x - mean)(x - mean)^T. Eigenvalues and explained-variance
// ratios cover the full spectrum; `components` keeps the retained columns.
// The retained count is min(smallest d whose cumulative ratio exceeds the
// variance target, max_components, min(m, p)). Each retained eigenvector is
// sign-fixed so its largest-magnitude entry is nonnegative.
struct PcaModel {
    std::vector<double> mean;
    Matrix components;                   // p x d, column-orthonormal
    std::vector<double> eigenvalues;     // length p, nonincreasing, >= 0
    std::vector<double> explained_ratio; // length p, sums to ~1
    std::size_t retained = 0;
    double total_variance = 0.0;
    // All-constant input: no variance direction exists; by convention the
    // model keeps one component with ratio 1 and reports the condition.
    bool degenerate_variance = false;
};

PcaModel fit_pca(const Matrix& matrix, double variance_target = 0.95,
                 std::size_t max_components = 50);

// Row i of the result is components^T * (x_i - mean).
Matrix project(const PcaModel& model, const Matrix& matrix);

// Ratios of the retained components.
std::vector<double> explained_variance(const PcaModel& model);

nlohmann::json pca_to_json(const PcaModel& model);
PcaModel pca_from_json(const nlohmann::json& doc);

} // namespace flowsense

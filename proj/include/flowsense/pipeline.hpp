#pragma once

#include <cstddef>
#include <vector>

#include "flowsense/dataset.hpp"
#include "flowsense/features.hpp"
#include "flowsense/matrix.hpp"

namespace flowsense {

// Preprocessing shared by the detect command and the sweep: min-max
// normalization followed by principal-component projection.
struct PreprocessOptions {
    bool use_minmax = true;
    bool use_pca = true;
    double variance_target = 0.95;
    std::size_t max_components = 50;
};

struct Preprocessed {
    Matrix features;
    std::vector<Label> labels;
    std::size_t pca_dim = 0; // columns after projection (0 when PCA disabled)
};

// Record mode: each encoded record is one sample.
Preprocessed preprocess_records(const LabeledDataset& dataset,
                                const PreprocessOptions& options);

// Window mode: statistical + spectral features per window. A window counts
// as anomalous when any record inside it is anomalous.
Preprocessed preprocess_windows(const LabeledDataset& dataset, const WindowConfig& window,
                                std::size_t top_k, const PreprocessOptions& options);

} // namespace flowsense

#include "flowsense/pipeline.hpp"

#include "flowsense/pca.hpp"

namespace flowsense {

namespace {

Preprocessed finish(Matrix features, std::vector<Label> labels,
                    const PreprocessOptions& options) {
    Preprocessed out;
    out.labels = std::move(labels);

    if (options.use_minmax) {
        LabeledDataset tmp;
        tmp.matrix = std::move(features);
        tmp.labels.assign(tmp.matrix.rows(), Label::Normal);
        const auto scaler = fit_minmax(tmp);
        features = apply_minmax(scaler, tmp).matrix;
    }

    if (options.use_pca && features.rows() >= 2) {
        const auto model = fit_pca(features, options.variance_target, options.max_components);
        out.features = project(model, features);
        out.pca_dim = model.retained;
    } else {
        out.features = std::move(features);
    }
    return out;
}

} // namespace

Preprocessed preprocess_records(const LabeledDataset& dataset,
                                const PreprocessOptions& options) {
    return finish(dataset.matrix, dataset.labels, options);
}

Preprocessed preprocess_windows(const LabeledDataset& dataset, const WindowConfig& window,
                                std::size_t top_k, const PreprocessOptions& options) {
    const auto windows = segment_windows(dataset.matrix, window);
    auto fm = assemble_features(windows, top_k);

    std::vector<Label> labels(windows.size(), Label::Normal);
    for (std::size_t w = 0; w < windows.size(); ++w) {
        for (std::size_t i = 0; i < window.length; ++i) {
            if (dataset.labels[windows[w].start_index + i] == Label::Anomaly) {
                labels[w] = Label::Anomaly;
                break;
            }
        }
    }
    return finish(std::move(fm.values), std::move(labels), options);
}

} // namespace flowsense

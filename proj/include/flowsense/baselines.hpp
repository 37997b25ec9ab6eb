#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "flowsense/dpc.hpp"
#include "flowsense/matrix.hpp"

#include <json.hpp>

namespace flowsense {

// Common result shape for all detectors. Scores are oriented so higher
// means more anomalous, and comparing score > threshold reproduces
// is_anomaly exactly.
struct DetectorVerdict {
    std::vector<bool> is_anomaly;
    std::vector<double> score;
    double threshold = 0.0;
    std::string method_name;
    nlohmann::json params_echo;

    std::size_t size() const { return score.size(); }
};

// Lloyd iterations from squared-distance-weighted seeding; the anomaly score
// is the distance to the nearest centroid and the decision threshold is the
// nearest-rank q-quantile of all scores.
struct KMeansConfig {
    std::size_t k = 4;
    std::size_t max_iters = 100;
    double quantile = 0.99;
    std::uint64_t seed = 42;
};

DetectorVerdict kmeans_detect(const Matrix& matrix, const KMeansConfig& config);

// Classical isolation forest: trees on subsamples with uniform split feature
// and split value, height ceiling log2(subsample), harmonic-number path
// correction at leaves, score 2^(-E[h]/c(subsample)).
struct IForestConfig {
    std::size_t n_trees = 100;
    std::size_t subsample = 256;
    double score_threshold = 0.6;
    std::uint64_t seed = 42;
};

DetectorVerdict iforest_detect(const Matrix& matrix, const IForestConfig& config);

// Classical DBSCAN; noise points are the anomalies (score 1, others 0).
// The neighbor count excludes the point itself.
struct DbscanConfig {
    double eps = 0.15;
    std::size_t min_pts = 4;
};

DetectorVerdict dbscan_detect(const Matrix& matrix, const DbscanConfig& config);

// Adapts a density-peaks result to the shared verdict contract.
DetectorVerdict dpc_verdict(const DpcResult& result);

nlohmann::json verdict_to_json(const DetectorVerdict& verdict);
// Same column set as the density-peaks CSV; rho/delta/cluster stay empty
// for methods that do not produce them.
void write_verdict_csv(const DetectorVerdict& verdict, std::ostream& out);

} // namespace flowsense

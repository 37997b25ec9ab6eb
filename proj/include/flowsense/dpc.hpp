#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "flowsense/matrix.hpp"

#include <json.hpp>

namespace flowsense {

enum class ScoreMode : std::uint8_t { Raw, Normalized };

std::string to_string(ScoreMode mode);
ScoreMode score_mode_from_string(const std::string& name);

// Density-peaks detector parameters. The raw score delta/rho mixes a
// normalized distance with a neighbor count, so its scale shifts with the
// data volume; normalized mode rescales both to [0,1] first and is the
// default. Raw mode keeps the literal ratio.
struct DpcParams {
    double d_c = 0.15;         // truncation distance for the density count
    double rho_min = 8.0;      // center selection: density threshold
    double delta_min = 0.18;   // center selection: separation threshold
    double a_th = 1.4;         // anomaly when score exceeds this
    ScoreMode score_mode = ScoreMode::Normalized;
    std::size_t batch_cap = 10000; // longer inputs are processed per batch
};

// Symmetric pairwise Euclidean distances with zero diagonal, stored as the
// packed upper triangle (m(m-1)/2 doubles).
class DistanceMatrix {
public:
    DistanceMatrix() = default;
    explicit DistanceMatrix(std::size_t m) : m_(m), d_(m < 2 ? 0 : m * (m - 1) / 2) {}

    std::size_t size() const { return m_; }

    double operator()(std::size_t i, std::size_t j) const {
        if (i == j) return 0.0;
        return d_[pack(i, j)];
    }

    void set(std::size_t i, std::size_t j, double value) { d_[pack(i, j)] = value; }

private:
    std::size_t pack(std::size_t i, std::size_t j) const {
        if (i > j) std::swap(i, j);
        return i * m_ - i * (i + 1) / 2 + (j - i - 1);
    }

    std::size_t m_ = 0;
    std::vector<double> d_;
};

DistanceMatrix pairwise_distances(const Matrix& matrix);

// rho_i = |{ j != i : d(i,j) < d_c }|, strict inequality, self excluded so
// isolated points reach density zero.
std::vector<std::size_t> local_density(const DistanceMatrix& dist, double d_c);

// Density ordering plus per-point separation. order sorts indices by
// (density descending, index ascending). The head of the order takes
// delta = max_j d(i,j) and has no neighbor; every other point takes the
// minimum distance to a point earlier in the order, argmin ties resolved
// toward the lower index.
struct DpcState {
    std::vector<std::size_t> rho;
    std::vector<double> delta;
    std::vector<std::optional<std::size_t>> nneigh;
    std::vector<std::size_t> order;

    std::size_t size() const { return rho.size(); }
};

DpcState delta_and_neighbors(const DistanceMatrix& dist, std::vector<std::size_t> rho);

// Centers are points with rho >= rho_min and delta >= delta_min. If none
// qualify, the point maximizing rho * delta is promoted (lowest index on
// ties) so assignment always has a root.
std::vector<std::size_t> select_centers(const DpcState& state, double rho_min,
                                        double delta_min);

// Single pass over the density order: centers label themselves, everyone
// else inherits the label of their nearest denser neighbor. Labels are
// center point indices.
std::vector<std::int64_t> assign_clusters(const DpcState& state,
                                          const std::vector<std::size_t>& centers);

// Raw: delta/rho. Normalized: (delta/max delta) / (rho/max rho), with an
// all-zero delta column collapsing to zero scores. Density zero always
// yields +infinity, which marks the point as an outlier directly.
std::vector<double> anomaly_scores(const DpcState& state, ScoreMode mode);

struct DpcResult {
    DpcState state;
    std::vector<std::size_t> centers;
    std::vector<std::int64_t> cluster_label; // center index, or -1 for anomalies
    std::vector<double> score;
    std::vector<bool> is_anomaly;
    DpcParams params;

    std::size_t size() const { return score.size(); }
};

// The full detector: distances, densities, separations, centers,
// assignment, scores. is_anomaly[i] iff rho_i == 0 or score_i > a_th.
DpcResult detect(const Matrix& matrix, const DpcParams& params);

// Processes inputs longer than params.batch_cap in consecutive batches with
// an independent model per batch; per-point outputs are concatenated and
// cluster labels / centers / neighbors are offset to global row indices.
DpcResult detect_batched(const Matrix& matrix, const DpcParams& params);

nlohmann::json dpc_to_json(const DpcResult& result);
void write_dpc_csv(const DpcResult& result, std::ostream& out);

} // namespace flowsense

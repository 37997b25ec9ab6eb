#include "flowsense/dpc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "flowsense/error.hpp"
#include "flowsense/format.hpp"

namespace flowsense {

std::string to_string(ScoreMode mode) {
    return mode == ScoreMode::Raw ? "raw" : "normalized";
}

ScoreMode score_mode_from_string(const std::string& name) {
    if (name == "raw") return ScoreMode::Raw;
    if (name == "normalized") return ScoreMode::Normalized;
    throw ConfigError("unknown score mode '" + name + "' (raw|normalized)");
}

DistanceMatrix pairwise_distances(const Matrix& matrix) {
    if (matrix.rows() == 0)
        throw DomainError("cannot compute distances of an empty matrix");
    if (!matrix.all_finite())
        throw DomainError("matrix contains non-finite values");

    const std::size_t m = matrix.rows();
    const std::size_t n = matrix.cols();
    DistanceMatrix dist(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double* xi = matrix.data() + i * n;
        for (std::size_t j = i + 1; j < m; ++j) {
            const double* xj = matrix.data() + j * n;
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                const double d = xi[k] - xj[k];
                s += d * d;
            }
            dist.set(i, j, std::sqrt(s));
        }
    }
    return dist;
}

std::vector<std::size_t> local_density(const DistanceMatrix& dist, double d_c) {
    if (!(d_c > 0.0))
        throw ConfigError("truncation distance must be > 0");

    const std::size_t m = dist.size();
    std::vector<std::size_t> rho(m, 0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j)
            if (dist(i, j) < d_c) {
                ++rho[i];
                ++rho[j];
            }
    return rho;
}

DpcState delta_and_neighbors(const DistanceMatrix& dist, std::vector<std::size_t> rho) {
    const std::size_t m = dist.size();
    if (rho.size() != m)
        throw DimensionError("density vector length " + std::to_string(rho.size()) +
                             " does not match matrix size " + std::to_string(m));

    DpcState state;
    state.rho = std::move(rho);
    state.delta.assign(m, 0.0);
    state.nneigh.assign(m, std::nullopt);

    state.order.resize(m);
    std::iota(state.order.begin(), state.order.end(), 0);
    std::sort(state.order.begin(), state.order.end(), [&](std::size_t a, std::size_t b) {
        if (state.rho[a] != state.rho[b]) return state.rho[a] > state.rho[b];
        return a < b;
    });

    if (m == 0) return state;

    const std::size_t head = state.order[0];
    for (std::size_t j = 0; j < m; ++j)
        state.delta[head] = std::max(state.delta[head], dist(head, j));

    for (std::size_t pos = 1; pos < m; ++pos) {
        const std::size_t i = state.order[pos];
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_j = 0;
        for (std::size_t prev = 0; prev < pos; ++prev) {
            const std::size_t j = state.order[prev];
            const double d = dist(i, j);
            if (d < best || (d == best && j < best_j)) {
                best = d;
                best_j = j;
            }
        }
        state.delta[i] = best;
        state.nneigh[i] = best_j;
    }
    return state;
}

std::vector<std::size_t> select_centers(const DpcState& state, double rho_min,
                                        double delta_min) {
    std::vector<std::size_t> centers;
    for (std::size_t i = 0; i < state.size(); ++i)
        if (static_cast<double>(state.rho[i]) >= rho_min && state.delta[i] >= delta_min)
            centers.push_back(i);

    if (centers.empty() && state.size() > 0) {
        std::size_t best = 0;
        double best_score = -1.0;
        for (std::size_t i = 0; i < state.size(); ++i) {
            const double s = static_cast<double>(state.rho[i]) * state.delta[i];
            if (s > best_score) {
                best_score = s;
                best = i;
            }
        }
        centers.push_back(best);
    }
    return centers;
}

std::vector<std::int64_t> assign_clusters(const DpcState& state,
                                          const std::vector<std::size_t>& centers) {
    if (centers.empty())
        throw DomainError("cannot assign clusters without centers");

    const std::size_t m = state.size();
    std::vector<bool> is_center(m, false);
    for (std::size_t c : centers) is_center[c] = true;

    std::vector<std::int64_t> labels(m, -1);
    for (std::size_t i : state.order) {
        if (is_center[i]) {
            labels[i] = static_cast<std::int64_t>(i);
        } else {
            if (!state.nneigh[i].has_value() || labels[*state.nneigh[i]] < 0)
                throw DomainError("assignment order invariant violated at point " +
                                  std::to_string(i));
            labels[i] = labels[*state.nneigh[i]];
        }
    }
    return labels;
}

std::vector<double> anomaly_scores(const DpcState& state, ScoreMode mode) {
    const std::size_t m = state.size();
    std::vector<double> scores(m, 0.0);
    if (m == 0) return scores;

    const double inf = std::numeric_limits<double>::infinity();
    if (mode == ScoreMode::Raw) {
        for (std::size_t i = 0; i < m; ++i)
            scores[i] = state.rho[i] == 0
                            ? inf
                            : state.delta[i] / static_cast<double>(state.rho[i]);
        return scores;
    }

    const double max_rho =
        static_cast<double>(*std::max_element(state.rho.begin(), state.rho.end()));
    const double max_delta = *std::max_element(state.delta.begin(), state.delta.end());

    for (std::size_t i = 0; i < m; ++i) {
        if (state.rho[i] == 0) {
            scores[i] = inf;
            continue;
        }
        const double rho_hat = static_cast<double>(state.rho[i]) / max_rho;
        const double delta_hat = max_delta == 0.0 ? 0.0 : state.delta[i] / max_delta;
        scores[i] = delta_hat / rho_hat;
    }
    return scores;
}

DpcResult detect(const Matrix& matrix, const DpcParams& params) {
    if (matrix.rows() == 0)
        throw DomainError("cannot run detection on an empty matrix");
    if (!(params.a_th > 0.0))
        throw ConfigError("anomaly threshold must be > 0");

    DpcResult result;
    result.params = params;

    const auto dist = pairwise_distances(matrix);
    auto rho = local_density(dist, params.d_c);
    result.state = delta_and_neighbors(dist, std::move(rho));
    result.centers = select_centers(result.state, params.rho_min, params.delta_min);
    result.cluster_label = assign_clusters(result.state, result.centers);
    result.score = anomaly_scores(result.state, params.score_mode);

    const std::size_t m = matrix.rows();
    result.is_anomaly.assign(m, false);
    for (std::size_t i = 0; i < m; ++i) {
        if (result.state.rho[i] == 0 || result.score[i] > params.a_th) {
            result.is_anomaly[i] = true;
            result.cluster_label[i] = -1;
        }
    }
    return result;
}

DpcResult detect_batched(const Matrix& matrix, const DpcParams& params) {
    if (params.batch_cap == 0)
        throw ConfigError("batch cap must be >= 1");
    if (matrix.rows() <= params.batch_cap) return detect(matrix, params);

    DpcResult all;
    all.params = params;

    for (std::size_t start = 0; start < matrix.rows(); start += params.batch_cap) {
        const std::size_t len = std::min(params.batch_cap, matrix.rows() - start);
        Matrix batch(len, matrix.cols());
        for (std::size_t i = 0; i < len; ++i)
            for (std::size_t j = 0; j < matrix.cols(); ++j)
                batch(i, j) = matrix(start + i, j);

        auto r = detect(batch, params);
        for (std::size_t i = 0; i < len; ++i) {
            all.state.rho.push_back(r.state.rho[i]);
            all.state.delta.push_back(r.state.delta[i]);
            all.state.nneigh.push_back(
                r.state.nneigh[i] ? std::optional<std::size_t>(*r.state.nneigh[i] + start)
                                  : std::nullopt);
            all.cluster_label.push_back(r.cluster_label[i] < 0
                                            ? -1
                                            : r.cluster_label[i] +
                                                  static_cast<std::int64_t>(start));
            all.score.push_back(r.score[i]);
            all.is_anomaly.push_back(r.is_anomaly[i]);
        }
        for (std::size_t i : r.state.order) all.state.order.push_back(i + start);
        for (std::size_t c : r.centers) all.centers.push_back(c + start);
    }
    return all;
}

namespace {

nlohmann::json score_to_json(double score) {
    if (std::isinf(score)) return "inf";
    return score;
}

} // namespace

nlohmann::json dpc_to_json(const DpcResult& result) {
    nlohmann::json doc;
    doc["method"] = "dpc";
    doc["params"] = {{"d_c", result.params.d_c},
                     {"rho_min", result.params.rho_min},
                     {"delta_min", result.params.delta_min},
                     {"a_th", result.params.a_th},
                     {"score_mode", to_string(result.params.score_mode)}};
    doc["centers"] = result.centers;

    auto points = nlohmann::json::array();
    for (std::size_t i = 0; i < result.size(); ++i) {
        points.push_back({{"index", i},
                          {"rho", result.state.rho[i]},
                          {"delta", result.state.delta[i]},
                          {"score", score_to_json(result.score[i])},
                          {"label", result.cluster_label[i]},
                          {"is_anomaly", static_cast<bool>(result.is_anomaly[i])}});
    }
    doc["points"] = std::move(points);
    return doc;
}

void write_dpc_csv(const DpcResult& result, std::ostream& out) {
    out << "index,rho,delta,score,cluster,is_anomaly\n";
    for (std::size_t i = 0; i < result.size(); ++i) {
        out << i << ',' << result.state.rho[i] << ',' << format_double(result.state.delta[i])
            << ',' << (std::isinf(result.score[i]) ? "inf" : format_double(result.score[i]))
            << ',' << result.cluster_label[i] << ',' << (result.is_anomaly[i] ? 1 : 0)
            << '\n';
    }
}

} // namespace flowsense

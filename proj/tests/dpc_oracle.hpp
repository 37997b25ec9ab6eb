#pragma once

// Brute-force density-peaks reference, independent of the library path: no
// distance matrix reuse, no ordering shortcuts, assignment by recursive
// chain following. O(m^3) worst case; test-only.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "flowsense/dpc.hpp"
#include "flowsense/matrix.hpp"

namespace flowsense::test {

struct OracleResult {
    std::vector<std::size_t> rho;
    std::vector<double> delta;
    std::vector<std::optional<std::size_t>> nneigh;
    std::vector<std::size_t> centers;
    std::vector<std::int64_t> labels;
    std::vector<double> scores;
    std::vector<bool> is_anomaly;
};

inline double oracle_distance(const Matrix& x, std::size_t i, std::size_t j) {
    double s = 0.0;
    for (std::size_t k = 0; k < x.cols(); ++k) {
        const double d = x(i, k) - x(j, k);
        s += d * d;
    }
    return std::sqrt(s);
}

inline OracleResult dpc_oracle(const Matrix& x, const DpcParams& params) {
    const std::size_t m = x.rows();
    OracleResult r;
    r.rho.assign(m, 0);
    r.delta.assign(m, 0.0);
    r.nneigh.assign(m, std::nullopt);

    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            if (j != i && oracle_distance(x, i, j) < params.d_c) ++r.rho[i];

    // j precedes i when (rho_j, -j) > (rho_i, -i)
    auto precedes = [&](std::size_t j, std::size_t i) {
        return r.rho[j] > r.rho[i] || (r.rho[j] == r.rho[i] && j < i);
    };

    for (std::size_t i = 0; i < m; ++i) {
        bool any = false;
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_j = 0;
        for (std::size_t j = 0; j < m; ++j) {
            if (j == i || !precedes(j, i)) continue;
            const double d = oracle_distance(x, i, j);
            if (!any || d < best || (d == best && j < best_j)) {
                any = true;
                best = d;
                best_j = j;
            }
        }
        if (any) {
            r.delta[i] = best;
            r.nneigh[i] = best_j;
        } else {
            double mx = 0.0;
            for (std::size_t j = 0; j < m; ++j)
                mx = std::max(mx, oracle_distance(x, i, j));
            r.delta[i] = mx;
        }
    }

    for (std::size_t i = 0; i < m; ++i)
        if (static_cast<double>(r.rho[i]) >= params.rho_min &&
            r.delta[i] >= params.delta_min)
            r.centers.push_back(i);
    if (r.centers.empty() && m > 0) {
        std::size_t best = 0;
        double best_score = -1.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double s = static_cast<double>(r.rho[i]) * r.delta[i];
            if (s > best_score) {
                best_score = s;
                best = i;
            }
        }
        r.centers.push_back(best);
    }

    std::vector<bool> is_center(m, false);
    for (std::size_t c : r.centers) is_center[c] = true;
    r.labels.assign(m, -2);
    auto resolve = [&](auto&& self, std::size_t i) -> std::int64_t {
        if (r.labels[i] != -2) return r.labels[i];
        if (is_center[i]) return r.labels[i] = static_cast<std::int64_t>(i);
        return r.labels[i] = self(self, *r.nneigh[i]);
    };
    for (std::size_t i = 0; i < m; ++i) resolve(resolve, i);

    r.scores.assign(m, 0.0);
    const double inf = std::numeric_limits<double>::infinity();
    if (params.score_mode == ScoreMode::Raw) {
        for (std::size_t i = 0; i < m; ++i)
            r.scores[i] =
                r.rho[i] == 0 ? inf : r.delta[i] / static_cast<double>(r.rho[i]);
    } else {
        std::size_t max_rho = 0;
        double max_delta = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            max_rho = std::max(max_rho, r.rho[i]);
            max_delta = std::max(max_delta, r.delta[i]);
        }
        for (std::size_t i = 0; i < m; ++i) {
            if (r.rho[i] == 0) {
                r.scores[i] = inf;
                continue;
            }
            const double rho_hat =
                static_cast<double>(r.rho[i]) / static_cast<double>(max_rho);
            const double delta_hat = max_delta == 0.0 ? 0.0 : r.delta[i] / max_delta;
            r.scores[i] = delta_hat / rho_hat;
        }
    }

    r.is_anomaly.assign(m, false);
    for (std::size_t i = 0; i < m; ++i) {
        if (r.rho[i] == 0 || r.scores[i] > params.a_th) {
            r.is_anomaly[i] = true;
            r.labels[i] = -1;
        }
    }
    return r;
}

} // namespace flowsense::test

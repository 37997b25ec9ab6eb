#include "flowsense/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "flowsense/error.hpp"
#include "flowsense/format.hpp"
#include "flowsense/rng.hpp"

namespace flowsense {

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] - b[k];
        s += d * d;
    }
    return s;
}

// Nearest-rank quantile: the smallest value with at least ceil(q*m) values
// not above it.
double nearest_rank_quantile(std::vector<double> values, double q) {
    std::sort(values.begin(), values.end());
    const std::size_t m = values.size();
    std::size_t rank = static_cast<std::size_t>(
        std::ceil(q * static_cast<double>(m)));
    rank = std::clamp<std::size_t>(rank, 1, m);
    return values[rank - 1];
}

// Average path length of an unsuccessful BST search, the standard isolation
// forest normalizer. Harmonic numbers via ln(k) + Euler-Mascheroni.
double average_path_length(std::size_t n) {
    if (n <= 1) return 0.0;
    if (n == 2) return 1.0;
    constexpr double kEulerGamma = 0.5772156649015329;
    const double h = std::log(static_cast<double>(n - 1)) + kEulerGamma;
    return 2.0 * h - 2.0 * static_cast<double>(n - 1) / static_cast<double>(n);
}

struct IsoNode {
    // leaf when feature < 0
    int feature = -1;
    double split = 0.0;
    std::size_t size = 0;
    std::int32_t left = -1;
    std::int32_t right = -1;
};

class IsoTree {
public:
    IsoTree(const Matrix& data, std::vector<std::size_t> sample, std::size_t height_limit,
            SeededRng& rng)
        : data_(data) {
        build(std::move(sample), 0, height_limit, rng);
    }

    double path_length(std::span<const double> x) const {
        std::size_t node = 0;
        double depth = 0.0;
        while (nodes_[node].feature >= 0) {
            node = x[static_cast<std::size_t>(nodes_[node].feature)] < nodes_[node].split
                       ? static_cast<std::size_t>(nodes_[node].left)
                       : static_cast<std::size_t>(nodes_[node].right);
            depth += 1.0;
        }
        return depth + average_path_length(nodes_[node].size);
    }

private:
    std::int32_t build(std::vector<std::size_t> idx, std::size_t depth,
                       std::size_t height_limit, SeededRng& rng) {
        const std::int32_t self = static_cast<std::int32_t>(nodes_.size());
        nodes_.push_back({});
        nodes_[self].size = idx.size();

        if (idx.size() <= 1 || depth >= height_limit) return self;

        // features with spread at this node
        std::vector<int> candidates;
        std::vector<std::pair<double, double>> ranges(data_.cols());
        for (std::size_t f = 0; f < data_.cols(); ++f) {
            double lo = data_(idx[0], f), hi = lo;
            for (std::size_t i : idx) {
                lo = std::min(lo, data_(i, f));
                hi = std::max(hi, data_(i, f));
            }
            ranges[f] = {lo, hi};
            if (hi > lo) candidates.push_back(static_cast<int>(f));
        }
        if (candidates.empty()) return self;

        const int f = candidates[rng.uniform_index(candidates.size())];
        const auto [lo, hi] = ranges[static_cast<std::size_t>(f)];
        const double split = rng.uniform(lo, hi);

        std::vector<std::size_t> left, right;
        for (std::size_t i : idx)
            (data_(i, static_cast<std::size_t>(f)) < split ? left : right).push_back(i);
        if (left.empty() || right.empty()) return self;

        idx.clear();
        idx.shrink_to_fit();

        nodes_[self].feature = f;
        nodes_[self].split = split;
        const auto l = build(std::move(left), depth + 1, height_limit, rng);
        const auto r = build(std::move(right), depth + 1, height_limit, rng);
        nodes_[self].left = l;
        nodes_[self].right = r;
        return self;
    }

    const Matrix& data_;
    std::vector<IsoNode> nodes_;
};

} // namespace

DetectorVerdict kmeans_detect(const Matrix& matrix, const KMeansConfig& config) {
    const std::size_t m = matrix.rows();
    const std::size_t n = matrix.cols();
    if (config.k == 0)
        throw ConfigError("k must be >= 1");
    if (m < config.k)
        throw DomainError("too few points: " + std::to_string(m) + " < k = " +
                          std::to_string(config.k));
    if (!(config.quantile > 0.0 && config.quantile <= 1.0))
        throw ConfigError("quantile must lie in (0, 1]");

    SeededRng rng = SeededRng(config.seed).child("kmeans");

    // Squared-distance-weighted seeding.
    Matrix centroids(config.k, n);
    std::vector<double> d2(m, std::numeric_limits<double>::infinity());
    {
        const std::size_t first = rng.uniform_index(m);
        for (std::size_t j = 0; j < n; ++j) centroids(0, j) = matrix(first, j);
        for (std::size_t c = 1; c < config.k; ++c) {
            double total = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                d2[i] = std::min(d2[i], squared_distance(matrix.row(i), centroids.row(c - 1)));
                total += d2[i];
            }
            std::size_t pick = 0;
            if (total > 0.0) {
                const double target = rng.uniform01() * total;
                double acc = 0.0;
                for (std::size_t i = 0; i < m; ++i) {
                    acc += d2[i];
                    if (acc >= target) {
                        pick = i;
                        break;
                    }
                }
            } else {
                pick = rng.uniform_index(m);
            }
            for (std::size_t j = 0; j < n; ++j) centroids(c, j) = matrix(pick, j);
        }
    }

    std::vector<std::size_t> assign(m, 0);
    std::vector<double> objective_history;
    for (std::size_t iter = 0; iter < std::max<std::size_t>(config.max_iters, 1); ++iter) {
        bool changed = false;
        double objective = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            std::size_t best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < config.k; ++c) {
                const double d = squared_distance(matrix.row(i), centroids.row(c));
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            objective += best_d;
            if (assign[i] != best) {
                assign[i] = best;
                changed = true;
            }
        }
        objective_history.push_back(objective);
        if (!changed && iter > 0) break;

        Matrix sums(config.k, n);
        std::vector<std::size_t> counts(config.k, 0);
        for (std::size_t i = 0; i < m; ++i) {
            ++counts[assign[i]];
            for (std::size_t j = 0; j < n; ++j) sums(assign[i], j) += matrix(i, j);
        }
        for (std::size_t c = 0; c < config.k; ++c) {
            if (counts[c] == 0) continue; // empty cluster keeps its centroid
            for (std::size_t j = 0; j < n; ++j)
                centroids(c, j) = sums(c, j) / static_cast<double>(counts[c]);
        }
    }

    DetectorVerdict verdict;
    verdict.method_name = "kmeans";
    verdict.score.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < config.k; ++c)
            best = std::min(best, squared_distance(matrix.row(i), centroids.row(c)));
        verdict.score[i] = std::sqrt(best);
    }
    verdict.threshold = nearest_rank_quantile(verdict.score, config.quantile);
    verdict.is_anomaly.resize(m);
    for (std::size_t i = 0; i < m; ++i)
        verdict.is_anomaly[i] = verdict.score[i] > verdict.threshold;
    verdict.params_echo = {{"k", config.k},
                           {"max_iters", config.max_iters},
                           {"quantile", config.quantile},
                           {"seed", config.seed},
                           {"objective_history", objective_history}};
    return verdict;
}

DetectorVerdict iforest_detect(const Matrix& matrix, const IForestConfig& config) {
    const std::size_t m = matrix.rows();
    if (m < 2)
        throw DomainError("too few points for an isolation forest: " + std::to_string(m));
    if (config.n_trees == 0)
        throw ConfigError("n_trees must be >= 1");
    if (config.subsample < 2)
        throw ConfigError("subsample must be >= 2");

    const std::size_t sample_size = std::min(config.subsample, m);
    const std::size_t height_limit = static_cast<std::size_t>(
        std::ceil(std::log2(static_cast<double>(sample_size))));

    SeededRng root(config.seed);
    std::vector<double> path_sum(m, 0.0);
    std::vector<std::size_t> indices(m);

    for (std::size_t t = 0; t < config.n_trees; ++t) {
        SeededRng rng = root.child("tree", t);
        std::iota(indices.begin(), indices.end(), 0);
        // partial Fisher-Yates: without-replacement subsample
        for (std::size_t i = 0; i < sample_size; ++i) {
            const std::size_t j = i + rng.uniform_index(m - i);
            std::swap(indices[i], indices[j]);
        }
        IsoTree tree(matrix, {indices.begin(), indices.begin() + static_cast<std::ptrdiff_t>(sample_size)},
                     height_limit, rng);
        for (std::size_t i = 0; i < m; ++i) path_sum[i] += tree.path_length(matrix.row(i));
    }

    const double normalizer = average_path_length(sample_size);
    DetectorVerdict verdict;
    verdict.method_name = "iforest";
    verdict.threshold = config.score_threshold;
    verdict.score.resize(m);
    verdict.is_anomaly.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double avg = path_sum[i] / static_cast<double>(config.n_trees);
        verdict.score[i] = std::pow(2.0, -avg / normalizer);
        verdict.is_anomaly[i] = verdict.score[i] > verdict.threshold;
    }
    verdict.params_echo = {{"n_trees", config.n_trees},
                           {"subsample", config.subsample},
                           {"score_threshold", config.score_threshold},
                           {"seed", config.seed}};
    return verdict;
}

DetectorVerdict dbscan_detect(const Matrix& matrix, const DbscanConfig& config) {
    const std::size_t m = matrix.rows();
    if (m == 0)
        throw DomainError("cannot run detection on an empty matrix");
    if (!(config.eps > 0.0))
        throw ConfigError("eps must be > 0");

    const auto dist = pairwise_distances(matrix);

    std::vector<std::vector<std::size_t>> neighbors(m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j)
            if (dist(i, j) <= config.eps) {
                neighbors[i].push_back(j);
                neighbors[j].push_back(i);
            }

    std::vector<bool> core(m, false);
    for (std::size_t i = 0; i < m; ++i) core[i] = neighbors[i].size() >= config.min_pts;

    constexpr std::int64_t kUnvisited = -2, kNoise = -1;
    std::vector<std::int64_t> label(m, kUnvisited);
    std::int64_t next_cluster = 0;

    for (std::size_t i = 0; i < m; ++i) {
        if (label[i] != kUnvisited || !core[i]) continue;
        const std::int64_t cid = next_cluster++;
        std::vector<std::size_t> queue = {i};
        label[i] = cid;
        while (!queue.empty()) {
            const std::size_t cur = queue.back();
            queue.pop_back();
            for (std::size_t nb : neighbors[cur]) {
                if (label[nb] >= 0) continue;
                label[nb] = cid;
                if (core[nb]) queue.push_back(nb);
            }
        }
    }
    for (auto& l : label)
        if (l == kUnvisited) l = kNoise;

    DetectorVerdict verdict;
    verdict.method_name = "dbscan";
    verdict.threshold = 0.5;
    verdict.score.resize(m);
    verdict.is_anomaly.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        verdict.score[i] = label[i] == kNoise ? 1.0 : 0.0;
        verdict.is_anomaly[i] = label[i] == kNoise;
    }
    verdict.params_echo = {{"eps", config.eps}, {"min_pts", config.min_pts}};
    return verdict;
}

DetectorVerdict dpc_verdict(const DpcResult& result) {
    DetectorVerdict verdict;
    verdict.method_name = "dpc";
    verdict.threshold = result.params.a_th;
    verdict.score = result.score;
    verdict.is_anomaly = result.is_anomaly;
    verdict.params_echo = {{"d_c", result.params.d_c},
                           {"rho_min", result.params.rho_min},
                           {"delta_min", result.params.delta_min},
                           {"a_th", result.params.a_th},
                           {"score_mode", to_string(result.params.score_mode)}};
    return verdict;
}

nlohmann::json verdict_to_json(const DetectorVerdict& verdict) {
    nlohmann::json doc;
    doc["method"] = verdict.method_name;
    doc["params"] = verdict.params_echo;
    doc["threshold"] = verdict.threshold;
    auto points = nlohmann::json::array();
    for (std::size_t i = 0; i < verdict.size(); ++i) {
        points.push_back({{"index", i},
                          {"score", std::isinf(verdict.score[i])
                                        ? nlohmann::json("inf")
                                        : nlohmann::json(verdict.score[i])},
                          {"is_anomaly", static_cast<bool>(verdict.is_anomaly[i])}});
    }
    doc["points"] = std::move(points);
    return doc;
}

void write_verdict_csv(const DetectorVerdict& verdict, std::ostream& out) {
    out << "index,rho,delta,score,cluster,is_anomaly\n";
    for (std::size_t i = 0; i < verdict.size(); ++i) {
        out << i << ",,,"
            << (std::isinf(verdict.score[i]) ? "inf" : format_double(verdict.score[i]))
            << ",," << (verdict.is_anomaly[i] ? 1 : 0) << '\n';
    }
}

} // namespace flowsense

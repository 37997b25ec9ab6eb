#include "flowsense/pca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "flowsense/error.hpp"

namespace flowsense {

namespace {

double off_diagonal_norm(const Matrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
}

double frobenius_norm(const Matrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
}

} // namespace

EigenDecomposition eigen_symmetric(const Matrix& symmetric) {
    if (symmetric.rows() != symmetric.cols())
        throw DimensionError("eigen_symmetric requires a square matrix");

    const std::size_t p = symmetric.rows();
    Matrix a = symmetric;
    Matrix v(p, p);
    for (std::size_t i = 0; i < p; ++i) v(i, i) = 1.0;

    const double tol = 1e-14 * std::max(1.0, frobenius_norm(a));
    const int max_sweeps = 100;

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        if (off_diagonal_norm(a) <= tol) break;
        for (std::size_t q = 1; q < p; ++q) {
            for (std::size_t r = 0; r < q; ++r) {
                const double apq = a(r, q);
                if (apq == 0.0) continue;

                const double theta = (a(q, q) - a(r, r)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                const double arr = a(r, r), aqq = a(q, q);
                a(r, r) = arr - t * apq;
                a(q, q) = aqq + t * apq;
                a(r, q) = a(q, r) = 0.0;

                for (std::size_t i = 0; i < p; ++i) {
                    if (i == r || i == q) continue;
                    const double air = a(i, r), aiq = a(i, q);
                    a(i, r) = a(r, i) = c * air - s * aiq;
                    a(i, q) = a(q, i) = s * air + c * aiq;
                }
                for (std::size_t i = 0; i < p; ++i) {
                    const double vir = v(i, r), viq = v(i, q);
                    v(i, r) = c * vir - s * viq;
                    v(i, q) = s * vir + c * viq;
                }
            }
        }
    }

    std::vector<std::size_t> idx(p);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });

    EigenDecomposition dec;
    dec.values.resize(p);
    dec.vectors = Matrix(p, p);
    for (std::size_t k = 0; k < p; ++k) {
        dec.values[k] = a(idx[k], idx[k]);
        for (std::size_t i = 0; i < p; ++i) dec.vectors(i, k) = v(i, idx[k]);
    }
    return dec;
}

PcaModel fit_pca(const Matrix& matrix, double variance_target, std::size_t max_components) {
    const std::size_t m = matrix.rows();
    const std::size_t p = matrix.cols();
    if (m < 2)
        throw DomainError("too few samples for covariance: " + std::to_string(m));
    if (p == 0)
        throw DomainError("matrix has no columns");
    if (!matrix.all_finite())
        throw DomainError("matrix contains non-finite values");
    if (!(variance_target > 0.0 && variance_target <= 1.0))
        throw ConfigError("variance target must lie in (0, 1]");
    if (max_components == 0)
        throw ConfigError("max_components must be >= 1");

    PcaModel model;
    model.mean.assign(p, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < p; ++j) model.mean[j] += matrix(i, j);
    for (std::size_t j = 0; j < p; ++j) model.mean[j] /= static_cast<double>(m);

    Matrix cov(p, p);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < p; ++j) {
            const double dj = matrix(i, j) - model.mean[j];
            for (std::size_t k = j; k < p; ++k)
                cov(j, k) += dj * (matrix(i, k) - model.mean[k]);
        }
    }
    for (std::size_t j = 0; j < p; ++j)
        for (std::size_t k = j; k < p; ++k)
            cov(k, j) = cov(j, k) /= static_cast<double>(m);

    double trace = 0.0;
    for (std::size_t j = 0; j < p; ++j) trace += cov(j, j);
    model.total_variance = trace;

    auto dec = eigen_symmetric(cov);
    for (double& lambda : dec.values)
        if (lambda < 0.0) lambda = 0.0;
    model.eigenvalues = dec.values;

    model.explained_ratio.assign(p, 0.0);
    std::size_t d95 = p;
    if (trace <= 0.0) {
        model.degenerate_variance = true;
        model.explained_ratio[0] = 1.0;
        d95 = 1;
    } else {
        double cumulative = 0.0;
        d95 = p;
        for (std::size_t k = 0; k < p; ++k) {
            model.explained_ratio[k] = dec.values[k] / trace;
            cumulative += model.explained_ratio[k];
            if (cumulative > variance_target && d95 == p) d95 = k + 1;
        }
    }

    model.retained = std::min({d95, max_components, std::min(m, p)});

    model.components = Matrix(p, model.retained);
    for (std::size_t k = 0; k < model.retained; ++k) {
        std::size_t arg = 0;
        for (std::size_t i = 1; i < p; ++i)
            if (std::abs(dec.vectors(i, k)) > std::abs(dec.vectors(arg, k))) arg = i;
        const double sign = dec.vectors(arg, k) < 0.0 ? -1.0 : 1.0;
        for (std::size_t i = 0; i < p; ++i)
            model.components(i, k) = sign * dec.vectors(i, k);
    }
    return model;
}

Matrix project(const PcaModel& model, const Matrix& matrix) {
    const std::size_t p = model.mean.size();
    if (matrix.cols() != p)
        throw DimensionError("matrix has " + std::to_string(matrix.cols()) +
                             " columns but model expects " + std::to_string(p));

    Matrix out(matrix.rows(), model.retained);
    for (std::size_t i = 0; i < matrix.rows(); ++i)
        for (std::size_t k = 0; k < model.retained; ++k) {
            double acc = 0.0;
            for (std::size_t j = 0; j < p; ++j)
                acc += model.components(j, k) * (matrix(i, j) - model.mean[j]);
            out(i, k) = acc;
        }
    return out;
}

std::vector<double> explained_variance(const PcaModel& model) {
    return {model.explained_ratio.begin(),
            model.explained_ratio.begin() + static_cast<std::ptrdiff_t>(model.retained)};
}

nlohmann::json pca_to_json(const PcaModel& model) {
    nlohmann::json doc;
    doc["schema_version"] = 1;
    doc["mean"] = model.mean;
    doc["eigenvalues"] = model.eigenvalues;
    doc["explained_ratio"] = model.explained_ratio;
    doc["retained"] = model.retained;
    doc["total_variance"] = model.total_variance;
    doc["degenerate_variance"] = model.degenerate_variance;
    auto rows = nlohmann::json::array();
    for (std::size_t i = 0; i < model.components.rows(); ++i) {
        auto row = nlohmann::json::array();
        for (std::size_t k = 0; k < model.components.cols(); ++k)
            row.push_back(model.components(i, k));
        rows.push_back(std::move(row));
    }
    doc["components"] = std::move(rows);
    return doc;
}

PcaModel pca_from_json(const nlohmann::json& doc) {
    if (!doc.contains("schema_version") || doc["schema_version"].get<int>() != 1)
        throw ParseError("unsupported model schema version");

    PcaModel model;
    model.mean = doc.at("mean").get<std::vector<double>>();
    model.eigenvalues = doc.at("eigenvalues").get<std::vector<double>>();
    model.explained_ratio = doc.at("explained_ratio").get<std::vector<double>>();
    model.retained = doc.at("retained").get<std::size_t>();
    model.total_variance = doc.at("total_variance").get<double>();
    model.degenerate_variance = doc.at("degenerate_variance").get<bool>();

    const auto& rows = doc.at("components");
    model.components = Matrix(rows.size(), model.retained);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t k = 0; k < model.retained; ++k)
            model.components(i, k) = rows[i][k].get<double>();
    return model;
}

} // namespace flowsense

#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "flowsense/error.hpp"
#include "flowsense/features.hpp"
#include "test_util.hpp"

using namespace flowsense;

namespace {

Matrix column(const std::vector<double>& values) {
    Matrix m(values.size(), 1);
    for (std::size_t i = 0; i < values.size(); ++i) m(i, 0) = values[i];
    return m;
}

// Direct Eq-style summation, the reference the fast path must match.
std::vector<std::complex<double>> naive_dft(const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<std::complex<double>> out(n);
    for (std::size_t f = 0; f < n; ++f) {
        std::complex<double> acc = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            const double ang = -2.0 * std::numbers::pi * static_cast<double>(f) *
                               static_cast<double>(t) / static_cast<double>(n);
            acc += x[t] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        out[f] = acc;
    }
    return out;
}

} // namespace

TEST_SUITE_BEGIN("features");

TEST_CASE("tumbling windows partition the stream prefix") {
    const auto windows = segment_windows(Matrix(10, 2, 1.0), WindowConfig::tumbling(4));
    REQUIRE(windows.size() == 2);
    CHECK(windows[0].start_index == 0);
    CHECK(windows[1].start_index == 4);
    CHECK(windows[0].data.rows() == 4);
}

TEST_CASE("sliding windows advance by the stride") {
    const auto windows = segment_windows(Matrix(10, 1, 0.0), WindowConfig::sliding(4, 2));
    REQUIRE(windows.size() == 4);
    CHECK(windows[0].start_index == 0);
    CHECK(windows[3].start_index == 6);
}

TEST_CASE("segmentation rejects streams shorter than one window") {
    CHECK_THROWS_AS(segment_windows(Matrix(3, 1, 0.0), WindowConfig::tumbling(4)),
                    DomainError);
}

TEST_CASE("moments of a symmetric window") {
    const auto stats = compute_moments({0, column({1, 2, 3})});
    CHECK(stats.mean[0] == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(stats.variance[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(stats.skewness[0] == 0.0);
}

TEST_CASE("moments of a constant window use the degenerate skewness rule") {
    const auto stats = compute_moments({0, column({5, 5, 5, 5})});
    CHECK(stats.mean[0] == 5.0);
    CHECK(stats.variance[0] == 0.0);
    CHECK(stats.skewness[0] == 0.0);
}

TEST_CASE("moments of a spiked window match the hand-derived value") {
    const auto stats = compute_moments({0, column({0, 0, 0, 4})});
    CHECK(stats.mean[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(stats.variance[0] == doctest::Approx(3.0).epsilon(1e-15));
    // 16 / (3 * sqrt(3)), re-derived independently before freezing
    CHECK(stats.skewness[0] == doctest::Approx(3.079201435678004).epsilon(1e-12));
}

TEST_CASE("moments require at least three samples") {
    CHECK_THROWS_AS(compute_moments({0, column({1, 2})}), DomainError);
}

TEST_CASE("moments match definitional recomputation on random windows") {
    SeededRng rng(21);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t len = 3 + rng.uniform_index(61);
        const auto m = test::random_matrix(rng, len, 3, -5.0, 5.0);
        const auto stats = compute_moments({0, m});
        for (std::size_t j = 0; j < 3; ++j) {
            double mu = 0;
            for (std::size_t i = 0; i < len; ++i) mu += m(i, j);
            mu /= static_cast<double>(len);
            double var = 0;
            for (std::size_t i = 0; i < len; ++i)
                var += (m(i, j) - mu) * (m(i, j) - mu);
            var /= static_cast<double>(len);
            double skew = 0;
            if (var > 0) {
                const double sd = std::sqrt(var);
                for (std::size_t i = 0; i < len; ++i)
                    skew += std::pow((m(i, j) - mu) / sd, 3.0);
                skew *= static_cast<double>(len) /
                        ((static_cast<double>(len) - 1) * (static_cast<double>(len) - 2));
            }
            CHECK(stats.mean[j] == doctest::Approx(mu).epsilon(1e-12));
            CHECK(stats.variance[j] == doctest::Approx(var).epsilon(1e-12));
            CHECK(stats.skewness[j] == doctest::Approx(skew).epsilon(1e-12));
        }
    }
}

TEST_CASE("dft of a constant signal concentrates at DC") {
    const auto s = dft(std::vector<double>{3, 3, 3, 3});
    CHECK(s.coefficients[0].real() == doctest::Approx(12.0).epsilon(1e-12));
    for (std::size_t f = 1; f < 4; ++f)
        CHECK(s.magnitudes[f] == doctest::Approx(0.0).scale(1).epsilon(1e-12));
}

TEST_CASE("dft of an alternating signal matches the hand-derived spectrum") {
    const auto s = dft(std::vector<double>{1, 0, -1, 0});
    const std::vector<double> expected_mag = {0, 2, 0, 2};
    const std::vector<double> expected_psd = {0, 1, 0, 1};
    for (std::size_t f = 0; f < 4; ++f) {
        CHECK(s.magnitudes[f] == doctest::Approx(expected_mag[f]).scale(1).epsilon(1e-12));
        CHECK(s.psd[f] == doctest::Approx(expected_psd[f]).scale(1).epsilon(1e-12));
    }
}

TEST_CASE("dft of a single sample is the identity") {
    const auto s = dft(std::vector<double>{1});
    CHECK(s.coefficients[0] == std::complex<double>(1.0, 0.0));
}

TEST_CASE("dft rejects empty series") {
    CHECK_THROWS_AS(dft(std::vector<double>{}), DomainError);
}

TEST_CASE("fast transform agrees with direct summation on awkward lengths") {
    SeededRng rng(31);
    for (std::size_t n : {2u, 3u, 5u, 7u, 12u, 16u, 27u, 64u, 100u, 251u}) {
        const auto x = test::random_series(rng, n);
        const auto fast = dft(x);
        const auto slow = naive_dft(x);
        for (std::size_t f = 0; f < n; ++f)
            CHECK(std::abs(fast.coefficients[f] - slow[f]) < 1e-9);
    }
}

TEST_CASE("dft is linear") {
    SeededRng rng(41);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 4 + rng.uniform_index(60);
        const auto x = test::random_series(rng, n);
        const auto y = test::random_series(rng, n);
        const double a = rng.uniform(-2, 2), b = rng.uniform(-2, 2);
        std::vector<double> combined(n);
        for (std::size_t i = 0; i < n; ++i) combined[i] = a * x[i] + b * y[i];
        const auto sx = dft(x), sy = dft(y), sc = dft(combined);
        for (std::size_t f = 0; f < n; ++f)
            CHECK(std::abs(sc.coefficients[f] -
                           (a * sx.coefficients[f] + b * sy.coefficients[f])) < 1e-9);
    }
}

TEST_CASE("dft satisfies Parseval and conjugate symmetry") {
    SeededRng rng(51);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + rng.uniform_index(120);
        const auto x = test::random_series(rng, n);
        const auto s = dft(x);

        double time_energy = 0;
        for (double v : x) time_energy += v * v;
        double freq_energy = 0;
        for (std::size_t f = 0; f < n; ++f)
            freq_energy += std::norm(s.coefficients[f]);
        freq_energy /= static_cast<double>(n);
        CHECK(time_energy == doctest::Approx(freq_energy).epsilon(1e-9));

        for (std::size_t f = 1; f < n; ++f)
            CHECK(std::abs(s.coefficients[f] - std::conj(s.coefficients[n - f])) < 1e-9);
    }
}

TEST_CASE("constant shifts move the mean and nothing else") {
    SeededRng rng(61);
    const std::size_t len = 16;
    const auto base = test::random_matrix(rng, len, 1, -1.0, 1.0);
    const double c = 2.75;
    Matrix shifted = base;
    for (std::size_t i = 0; i < len; ++i) shifted(i, 0) += c;

    const auto s0 = compute_moments({0, base});
    const auto s1 = compute_moments({0, shifted});
    CHECK(s1.mean[0] == doctest::Approx(s0.mean[0] + c).epsilon(1e-12));
    CHECK(s1.variance[0] == doctest::Approx(s0.variance[0]).epsilon(1e-9));
    CHECK(s1.skewness[0] == doctest::Approx(s0.skewness[0]).epsilon(1e-9));

    std::vector<double> b(len), sh(len);
    for (std::size_t i = 0; i < len; ++i) {
        b[i] = base(i, 0);
        sh[i] = shifted(i, 0);
    }
    const auto f0 = dft(b), f1 = dft(sh);
    for (std::size_t f = 1; f < len; ++f)
        CHECK(std::abs(f1.coefficients[f] - f0.coefficients[f]) < 1e-9);
}

TEST_CASE("spectral features pick the top bins below the fold") {
    const auto s = dft(std::vector<double>{1, 0, -1, 0}); // magnitudes 0,2,0,2
    const auto feats = spectral_features(s, 2);
    REQUIRE(feats.top_magnitudes.size() == 2);
    CHECK(feats.top_magnitudes[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(feats.top_magnitudes[1] == doctest::Approx(0.0).scale(1).epsilon(1e-12));
    CHECK(feats.total_psd == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("spectral features of a constant signal vanish") {
    const auto feats = spectral_features(dft(std::vector<double>{4, 4, 4, 4, 4, 4}), 3);
    for (double m : feats.top_magnitudes)
        CHECK(m == doctest::Approx(0.0).scale(1).epsilon(1e-12));
    CHECK(feats.total_psd == doctest::Approx(0.0).scale(1).epsilon(1e-12));
}

TEST_CASE("spectral features zero-pad when k exceeds the usable bins") {
    const auto feats = spectral_features(dft(std::vector<double>{1, 0, -1, 0}), 5);
    CHECK(feats.top_magnitudes.size() == 5);
    CHECK(feats.top_magnitudes[2] == 0.0);
    CHECK(feats.top_magnitudes[4] == 0.0);
}

TEST_CASE("assembled features have one row per window and the documented width") {
    SeededRng rng(71);
    const auto m = test::random_matrix(rng, 12, 1);
    const auto windows = segment_windows(m, WindowConfig::tumbling(4));
    const auto fm = assemble_features(windows, 2);
    CHECK(fm.values.rows() == 3);
    CHECK(fm.values.cols() == 6); // 1 * (3 + 2 + 1)
    CHECK(fm.layout.size() == 6);
    CHECK(fm.layout[0] == "x0_mean");
    CHECK(fm.layout[5] == "x0_psd");
}

TEST_CASE("a constant stream produces identical feature rows") {
    const auto windows = segment_windows(Matrix(16, 2, 3.5), WindowConfig::tumbling(4));
    const auto fm = assemble_features(windows, 2);
    for (std::size_t w = 1; w < fm.values.rows(); ++w)
        for (std::size_t j = 0; j < fm.values.cols(); ++j)
            CHECK(fm.values(w, j) == fm.values(0, j));
}

TEST_CASE("permuting windows permutes feature rows identically") {
    SeededRng rng(81);
    const auto m = test::random_matrix(rng, 20, 2);
    auto windows = segment_windows(m, WindowConfig::tumbling(5));
    const auto fm = assemble_features(windows, 3);
    std::swap(windows[0], windows[3]);
    const auto permuted = assemble_features(windows, 3);
    for (std::size_t j = 0; j < fm.values.cols(); ++j) {
        CHECK(permuted.values(0, j) == fm.values(3, j));
        CHECK(permuted.values(3, j) == fm.values(0, j));
        CHECK(permuted.values(1, j) == fm.values(1, j));
    }
}

TEST_CASE("assembly rejects heterogeneous windows") {
    TimeWindow a{0, Matrix(4, 2, 0.0)};
    TimeWindow b{4, Matrix(4, 3, 0.0)};
    CHECK_THROWS_AS(assemble_features({a, b}, 2), DimensionError);
}

TEST_SUITE_END();

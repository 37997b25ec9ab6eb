#include "flowsense/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "flowsense/error.hpp"

namespace flowsense {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// Iterative radix-2 transform, in place. Twiddles come from std::polar per
// butterfly rather than a multiplicative recurrence to keep rounding flat.
void fft_pow2(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? 2.0 : -2.0) * kPi / static_cast<double>(len);
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < len / 2; ++k) {
                const auto w = std::polar(1.0, ang * static_cast<double>(k));
                const auto u = a[i + k];
                const auto v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
            }
        }
    }
    if (inverse) {
        const double inv = 1.0 / static_cast<double>(n);
        for (auto& x : a) x *= inv;
    }
}

// Bluestein chirp transform: DFT of arbitrary length via one power-of-two
// convolution. Chirp phases use n^2 mod 2N to stay within one period.
std::vector<std::complex<double>> fft_bluestein(const std::vector<std::complex<double>>& x) {
    const std::size_t n = x.size();
    const std::size_t m = next_pow2(2 * n - 1);

    std::vector<std::complex<double>> chirp(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t sq = (i * i) % (2 * n);
        chirp[i] = std::polar(1.0, -kPi * static_cast<double>(sq) / static_cast<double>(n));
    }

    std::vector<std::complex<double>> a(m), b(m);
    for (std::size_t i = 0; i < n; ++i) a[i] = x[i] * chirp[i];
    b[0] = std::conj(chirp[0]);
    for (std::size_t i = 1; i < n; ++i) b[i] = b[m - i] = std::conj(chirp[i]);

    fft_pow2(a, false);
    fft_pow2(b, false);
    for (std::size_t i = 0; i < m; ++i) a[i] *= b[i];
    fft_pow2(a, true);

    std::vector<std::complex<double>> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * chirp[i];
    return out;
}

std::vector<std::complex<double>> fft_forward(const std::vector<std::complex<double>>& x) {
    if (x.size() == 1) return x;
    if (is_pow2(x.size())) {
        auto a = x;
        fft_pow2(a, false);
        return a;
    }
    return fft_bluestein(x);
}

} // namespace

std::vector<TimeWindow> segment_windows(const Matrix& matrix, const WindowConfig& config) {
    if (config.length == 0 || config.stride == 0)
        throw ConfigError("window length and stride must be >= 1");
    if (matrix.rows() < config.length)
        throw DomainError("stream too short: " + std::to_string(matrix.rows()) +
                          " rows < window length " + std::to_string(config.length));

    std::vector<TimeWindow> windows;
    for (std::size_t start = 0; start + config.length <= matrix.rows();
         start += config.stride) {
        TimeWindow w;
        w.start_index = start;
        w.data = Matrix(config.length, matrix.cols());
        for (std::size_t i = 0; i < config.length; ++i)
            for (std::size_t j = 0; j < matrix.cols(); ++j)
                w.data(i, j) = matrix(start + i, j);
        windows.push_back(std::move(w));
    }
    return windows;
}

WindowStats compute_moments(const TimeWindow& window) {
    const std::size_t len = window.data.rows();
    const std::size_t n = window.data.cols();
    if (len < 3)
        throw DomainError("window too small for skewness: length " +
                          std::to_string(len) + " < 3");

    WindowStats stats;
    stats.mean.resize(n);
    stats.variance.resize(n);
    stats.skewness.resize(n);

    const double count = static_cast<double>(len);
    for (std::size_t j = 0; j < n; ++j) {
        double sum = 0.0;
        for (std::size_t i = 0; i < len; ++i) sum += window.data(i, j);
        const double mu = sum / count;

        double ss = 0.0;
        for (std::size_t i = 0; i < len; ++i) {
            const double d = window.data(i, j) - mu;
            ss += d * d;
        }
        const double var = ss / count;
        const double sd = std::sqrt(var);

        double skew = 0.0;
        if (sd > 0.0) {
            double cubes = 0.0;
            for (std::size_t i = 0; i < len; ++i) {
                const double z = (window.data(i, j) - mu) / sd;
                cubes += z * z * z;
            }
            skew = count / ((count - 1.0) * (count - 2.0)) * cubes;
        }

        stats.mean[j] = mu;
        stats.variance[j] = var;
        stats.skewness[j] = skew;
    }
    return stats;
}

Spectrum dft(std::span<const double> series) {
    if (series.empty())
        throw DomainError("cannot transform an empty series");

    std::vector<std::complex<double>> x(series.begin(), series.end());
    Spectrum spectrum;
    spectrum.coefficients = fft_forward(x);

    const std::size_t n = spectrum.coefficients.size();
    spectrum.magnitudes.resize(n);
    spectrum.psd.resize(n);
    for (std::size_t f = 0; f < n; ++f) {
        const double mag = std::abs(spectrum.coefficients[f]);
        spectrum.magnitudes[f] = mag;
        spectrum.psd[f] = mag * mag / static_cast<double>(n);
    }
    return spectrum;
}

SpectralFeatures spectral_features(const Spectrum& spectrum, std::size_t k) {
    if (k == 0)
        throw ConfigError("k must be >= 1");

    const std::size_t n = spectrum.size();
    const std::size_t half = n / 2;

    std::vector<std::size_t> bins;
    for (std::size_t f = 1; f <= half; ++f) bins.push_back(f);
    std::sort(bins.begin(), bins.end(), [&](std::size_t a, std::size_t b) {
        if (spectrum.magnitudes[a] != spectrum.magnitudes[b])
            return spectrum.magnitudes[a] > spectrum.magnitudes[b];
        return a < b;
    });

    SpectralFeatures out;
    out.top_magnitudes.assign(k, 0.0);
    for (std::size_t i = 0; i < k && i < bins.size(); ++i)
        out.top_magnitudes[i] = spectrum.magnitudes[bins[i]];
    for (std::size_t f = 1; f <= half; ++f) out.total_psd += spectrum.psd[f];
    return out;
}

FeatureMatrix assemble_features(const std::vector<TimeWindow>& windows, std::size_t k) {
    if (windows.empty())
        throw DomainError("no windows to assemble");

    const std::size_t len = windows[0].data.rows();
    const std::size_t n = windows[0].data.cols();
    for (const auto& w : windows)
        if (w.data.rows() != len || w.data.cols() != n)
            throw DimensionError("windows disagree in shape");

    FeatureMatrix fm;
    for (std::size_t j = 0; j < n; ++j) {
        const std::string base = "x" + std::to_string(j);
        fm.layout.push_back(base + "_mean");
        fm.layout.push_back(base + "_var");
        fm.layout.push_back(base + "_skew");
        for (std::size_t i = 1; i <= k; ++i)
            fm.layout.push_back(base + "_mag" + std::to_string(i));
        fm.layout.push_back(base + "_psd");
    }

    fm.values = Matrix(windows.size(), fm.layout.size());
    std::vector<double> series(len);

    for (std::size_t w = 0; w < windows.size(); ++w) {
        const auto stats = compute_moments(windows[w]);
        std::size_t out = 0;
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t i = 0; i < len; ++i) series[i] = windows[w].data(i, j);
            const auto spec = spectral_features(dft(series), k);

            fm.values(w, out++) = stats.mean[j];
            fm.values(w, out++) = stats.variance[j];
            fm.values(w, out++) = stats.skewness[j];
            for (double mag : spec.top_magnitudes) fm.values(w, out++) = mag;
            fm.values(w, out++) = spec.total_psd;
        }
    }
    return fm;
}

} // namespace flowsense

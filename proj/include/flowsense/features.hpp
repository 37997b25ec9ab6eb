#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "flowsense/matrix.hpp"

namespace flowsense {

// Window segmentation. Tumbling windows (stride == length) partition the
// stream; sliding windows overlap. Only full windows are emitted.
struct WindowConfig {
    std::size_t length = 32;
    std::size_t stride = 32;

    static WindowConfig tumbling(std::size_t length) { return {length, length}; }
    static WindowConfig sliding(std::size_t length, std::size_t stride) {
        return {length, stride};
    }
    bool is_tumbling() const { return stride == length; }
};

struct TimeWindow {
    std::size_t start_index = 0;
    Matrix data; // length x n slice
};

std::vector<TimeWindow> segment_windows(const Matrix& matrix, const WindowConfig& config);

// Per-dimension moments over one window: mean, population variance, and
// skewness N/((N-1)(N-2)) * sum(((x-mean)/sd)^3), zero where sd is zero.
struct WindowStats {
    std::vector<double> mean;
    std::vector<double> variance;
    std::vector<double> skewness;
};

WindowStats compute_moments(const TimeWindow& window);

// Full complex spectrum of one real series: X(f) = sum_t x_t e^(-j2pi f t/N)
// for f = 0..N-1, with magnitudes |X(f)| and periodogram psd |X(f)|^2 / N.
struct Spectrum {
    std::vector<std::complex<double>> coefficients;
    std::vector<double> magnitudes;
    std::vector<double> psd;

    std::size_t size() const { return coefficients.size(); }
};

Spectrum dft(std::span<const double> series);

// The k largest magnitudes among bins 1..N/2 (DC excluded; it duplicates the
// mean), sorted descending with ties broken by lower frequency, zero-padded
// when fewer bins exist; plus the total in-window PSD over those bins.
struct SpectralFeatures {
    std::vector<double> top_magnitudes;
    double total_psd = 0.0;
};

SpectralFeatures spectral_features(const Spectrum& spectrum, std::size_t k);

// One row per window: concatenation over input dimensions of
// [mean, variance, skewness, top-k magnitudes, total psd].
struct FeatureMatrix {
    Matrix values;
    std::vector<std::string> layout;
};

FeatureMatrix assemble_features(const std::vector<TimeWindow>& windows, std::size_t k);

} // namespace flowsense

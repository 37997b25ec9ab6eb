#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "flowsense/matrix.hpp"

namespace flowsense {

enum class Label : std::uint8_t { Normal, Anomaly };

enum class DatasetSource : std::uint8_t { NslKdd, UnswNb15, Synthetic, Csv };

std::string to_string(DatasetSource source);

// One input row before numeric encoding: feature fields as text plus the
// original label string.
struct RawRecord {
    std::vector<std::string> values;
    std::string label_text;
};

// A loaded but not yet encoded dataset.
struct RawTable {
    std::vector<RawRecord> records;
    std::vector<std::string> field_names;
    DatasetSource source = DatasetSource::Csv;
};

// Numeric feature matrix with per-record ground truth.
struct LabeledDataset {
    Matrix matrix;
    std::vector<Label> labels;
    std::vector<std::string> feature_names;
    DatasetSource source = DatasetSource::Csv;

    std::size_t size() const { return matrix.rows(); }
    std::size_t dim() const { return matrix.cols(); }
};

// Per-column encoding rule. Numeric columns pass through; categorical
// columns expand to one indicator column per category.
struct ColumnRule {
    enum class Kind : std::uint8_t { Numeric, OneHot };
    Kind kind = Kind::Numeric;
    std::vector<std::string> categories; // ordered, unique; OneHot only
};

struct EncodingSpec {
    std::vector<ColumnRule> columns;
    // Label strings listed here map to Normal; everything else is Anomaly.
    std::vector<std::string> normal_labels;
    // Strict mode (default) rejects categories absent from the rule;
    // open mode encodes them as an all-zeros indicator block.
    bool open_categories = false;
};

// Loads the 41-feature connection-record layout: 42 fields (features +
// label) or 43 (+ trailing difficulty field, which is dropped).
RawTable load_nsl_kdd(const std::filesystem::path& path);

// Loads the published 45-column train/test split layout (id, 42 features,
// attack_cat, binary label). A header row is auto-detected; id and
// attack_cat are dropped. Label "0" is normal, "1" is attack.
RawTable load_unsw_nb15(const std::filesystem::path& path);

// Reads a canonical dataset dump written by write_csv: numeric feature
// columns plus a final "label" column (normal/anomaly, or 0/1).
LabeledDataset load_dataset_csv(const std::filesystem::path& path);

// Builds an encoding spec from the data: a column is numeric if every value
// parses as a number, otherwise one-hot over its sorted unique values.
EncodingSpec infer_encoding(const RawTable& table);

LabeledDataset encode(const RawTable& table, const EncodingSpec& spec);

// Per-column affine map to [0,1] on the data it was fitted on. Out-of-range
// values under apply are not clamped: value 8 on a fitted range [2,6] maps
// to 1.5. A constant column maps to 0.
struct MinMaxScaler {
    std::vector<double> min;
    std::vector<double> max;
};

MinMaxScaler fit_minmax(const LabeledDataset& dataset);
LabeledDataset apply_minmax(const MinMaxScaler& scaler, const LabeledDataset& dataset);

// Imbalanced synthetic stream: n_normal points from n_clusters Gaussian
// blobs whose centers are drawn once from the unit hypercube, plus
// n_anomaly points uniform over [outlier_low, outlier_high]^dims.
struct SynthConfig {
    std::size_t n_normal = 1980;
    std::size_t n_anomaly = 20;
    std::size_t dims = 10;
    std::size_t n_clusters = 3;
    double cluster_spread = 0.02;
    double outlier_low = -0.25;
    double outlier_high = 1.25;
    std::uint64_t seed = 42;
};

LabeledDataset generate_synthetic(const SynthConfig& config);

// Canonical dump: header = feature_names + "label"; shortest exact decimal
// per value so a round trip through load_dataset_csv is lossless.
void write_dataset_csv(const LabeledDataset& dataset, std::ostream& out);
void write_dataset_csv(const LabeledDataset& dataset, const std::filesystem::path& path);

} // namespace flowsense

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "flowsense/baselines.hpp"
#include "flowsense/dataset.hpp"
#include "flowsense/dpc.hpp"
#include "flowsense/pipeline.hpp"

#include <json.hpp>

namespace flowsense {

// Counts with Anomaly as the positive class.
struct ConfusionMatrix {
    std::size_t tp = 0;
    std::size_t tn = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;

    std::size_t total() const { return tp + tn + fp + fn; }
};

ConfusionMatrix confusion(const std::vector<bool>& predicted,
                          const std::vector<Label>& truth);

// (tp + tn) / total. Throws on an empty matrix.
double accuracy(const ConfusionMatrix& cm);

// sqrt(TPR * TNR); a zero-denominator rate counts as 0.
double g_mean(const ConfusionMatrix& cm);

// fp / (fp + tn); zero denominator counts as 0.
double false_positive_rate(const ConfusionMatrix& cm);

// True when either rate above had a zero denominator (one class absent).
bool has_degenerate_rate(const ConfusionMatrix& cm);

struct MetricsReport {
    ConfusionMatrix confusion;
    double accuracy = 0.0;
    double g_mean = 0.0;
    double fpr = 0.0;
    bool degenerate_rates = false;
    std::string method_name;
    std::string setting;
    nlohmann::json params_echo;
    std::size_t data_volume = 0;
    std::uint64_t seed = 0;
    std::string status = "ok"; // or the error message for a failed cell
};

MetricsReport make_report(const DetectorVerdict& verdict, const std::vector<Label>& truth,
                          const std::string& setting, std::size_t data_volume,
                          std::uint64_t seed);

// One named density-peaks parameter configuration for the sweep.
struct DpcSetting {
    std::string name;
    DpcParams params;
};

// Data-volume x method x setting grid. The source is either a synthetic
// template (per-volume datasets drawn with the template's anomaly fraction)
// or a fixed dataset truncated to the first v rows.
struct SweepSpec {
    std::vector<std::size_t> volumes = {1000, 2000, 5000, 10000};
    std::vector<DpcSetting> dpc_settings;
    KMeansConfig kmeans;
    IForestConfig iforest;
    DbscanConfig dbscan;
    SynthConfig synth_template;
    std::optional<LabeledDataset> base_dataset;
    PreprocessOptions preprocess;
    std::uint64_t seed = 42;

    static std::vector<DpcSetting> default_settings();
};

struct SweepReport {
    std::vector<MetricsReport> cells; // sorted by (method, setting, volume)
    nlohmann::json spec_echo;
};

SweepReport run_sweep(const SweepSpec& spec);

// Columns: method,setting,volume,tp,tn,fp,fn,accuracy,g_mean,fpr,seed.
std::string sweep_to_csv(const SweepReport& report);
// Single-metric projection of the same cells (columns
// method,setting,volume,<metric>,seed).
std::string sweep_metric_csv(const SweepReport& report, const std::string& metric);
nlohmann::json sweep_to_json(const SweepReport& report);

} // namespace flowsense

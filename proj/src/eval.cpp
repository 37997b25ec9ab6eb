#include "flowsense/eval.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "flowsense/error.hpp"
#include "flowsense/format.hpp"
#include "flowsense/rng.hpp"

namespace flowsense {

ConfusionMatrix confusion(const std::vector<bool>& predicted,
                          const std::vector<Label>& truth) {
    if (predicted.size() != truth.size())
        throw DimensionError("prediction length " + std::to_string(predicted.size()) +
                             " does not match truth length " + std::to_string(truth.size()));
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const bool actual = truth[i] == Label::Anomaly;
        if (predicted[i] && actual) ++cm.tp;
        else if (!predicted[i] && !actual) ++cm.tn;
        else if (predicted[i] && !actual) ++cm.fp;
        else ++cm.fn;
    }
    return cm;
}

double accuracy(const ConfusionMatrix& cm) {
    if (cm.total() == 0)
        throw DomainError("accuracy undefined on an empty confusion matrix");
    return static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
}

double g_mean(const ConfusionMatrix& cm) {
    const std::size_t pos = cm.tp + cm.fn;
    const std::size_t neg = cm.tn + cm.fp;
    const double tpr = pos == 0 ? 0.0 : static_cast<double>(cm.tp) / static_cast<double>(pos);
    const double tnr = neg == 0 ? 0.0 : static_cast<double>(cm.tn) / static_cast<double>(neg);
    return std::sqrt(tpr * tnr);
}

double false_positive_rate(const ConfusionMatrix& cm) {
    const std::size_t neg = cm.fp + cm.tn;
    return neg == 0 ? 0.0 : static_cast<double>(cm.fp) / static_cast<double>(neg);
}

bool has_degenerate_rate(const ConfusionMatrix& cm) {
    return cm.tp + cm.fn == 0 || cm.tn + cm.fp == 0;
}

MetricsReport make_report(const DetectorVerdict& verdict, const std::vector<Label>& truth,
                          const std::string& setting, std::size_t data_volume,
                          std::uint64_t seed) {
    MetricsReport report;
    report.confusion = confusion(verdict.is_anomaly, truth);
    report.accuracy = accuracy(report.confusion);
    report.g_mean = g_mean(report.confusion);
    report.fpr = false_positive_rate(report.confusion);
    report.degenerate_rates = has_degenerate_rate(report.confusion);
    report.method_name = verdict.method_name;
    report.setting = setting;
    report.params_echo = verdict.params_echo;
    report.data_volume = data_volume;
    report.seed = seed;
    return report;
}

std::vector<DpcSetting> SweepSpec::default_settings() {
    // Setting 1 is the reference parameterization; 2 and 3 bracket it.
    DpcParams s1;
    DpcParams s2;
    s2.d_c = 0.10;
    s2.rho_min = 5.0;
    s2.delta_min = 0.15;
    s2.a_th = 1.2;
    DpcParams s3;
    s3.d_c = 0.20;
    s3.rho_min = 10.0;
    s3.delta_min = 0.25;
    s3.a_th = 1.6;
    return {{"Setting 1", s1}, {"Setting 2", s2}, {"Setting 3", s3}};
}

namespace {

LabeledDataset dataset_for_volume(const SweepSpec& spec, std::size_t volume,
                                  std::uint64_t dataset_seed) {
    if (spec.base_dataset) {
        const auto& base = *spec.base_dataset;
        if (volume > base.size())
            throw DomainError("volume " + std::to_string(volume) +
                              " exceeds dataset rows " + std::to_string(base.size()));
        LabeledDataset cut;
        cut.source = base.source;
        cut.feature_names = base.feature_names;
        cut.matrix = Matrix(volume, base.dim());
        for (std::size_t i = 0; i < volume; ++i)
            for (std::size_t j = 0; j < base.dim(); ++j)
                cut.matrix(i, j) = base.matrix(i, j);
        cut.labels.assign(base.labels.begin(),
                          base.labels.begin() + static_cast<std::ptrdiff_t>(volume));
        return cut;
    }

    SynthConfig cfg = spec.synth_template;
    const std::size_t total = cfg.n_normal + cfg.n_anomaly;
    cfg.n_anomaly = volume * spec.synth_template.n_anomaly / total;
    cfg.n_normal = volume - cfg.n_anomaly;
    cfg.seed = dataset_seed;
    return generate_synthetic(cfg);
}

struct CellJob {
    std::string method;
    std::string setting;
    std::size_t volume;
};

} // namespace

SweepReport run_sweep(const SweepSpec& spec) {
    if (spec.volumes.empty())
        throw ConfigError("sweep requires at least one data volume");

    const auto settings =
        spec.dpc_settings.empty() ? SweepSpec::default_settings() : spec.dpc_settings;

    SweepReport report;
    const SeededRng root(spec.seed);

    for (std::size_t volume : spec.volumes) {
        const std::uint64_t dataset_seed = root.child("dataset", volume).seed();

        std::vector<Label> truth;
        Matrix features;
        std::string prep_error;
        try {
            const auto data = dataset_for_volume(spec, volume, dataset_seed);
            auto prep = preprocess_records(data, spec.preprocess);
            truth = std::move(prep.labels);
            features = std::move(prep.features);
        } catch (const Error& e) {
            prep_error = e.what();
        }

        auto run_cell = [&](const std::string& method, const std::string& setting,
                            auto&& produce_verdict) {
            MetricsReport cell;
            cell.method_name = method;
            cell.setting = setting;
            cell.data_volume = volume;
            cell.seed = dataset_seed;
            if (!prep_error.empty()) {
                cell.status = prep_error;
            } else {
                try {
                    cell = make_report(produce_verdict(), truth, setting, volume,
                                       dataset_seed);
                } catch (const Error& e) {
                    cell.status = e.what();
                }
            }
            report.cells.push_back(std::move(cell));
        };

        for (const auto& setting : settings)
            run_cell("dpc", setting.name, [&] {
                return dpc_verdict(detect_batched(features, setting.params));
            });

        run_cell("kmeans", "default", [&] {
            KMeansConfig cfg = spec.kmeans;
            cfg.seed = root.child("kmeans", volume).seed();
            return kmeans_detect(features, cfg);
        });
        run_cell("iforest", "default", [&] {
            IForestConfig cfg = spec.iforest;
            cfg.seed = root.child("iforest", volume).seed();
            return iforest_detect(features, cfg);
        });
        run_cell("dbscan", "default",
                 [&] { return dbscan_detect(features, spec.dbscan); });
    }

    std::sort(report.cells.begin(), report.cells.end(),
              [](const MetricsReport& a, const MetricsReport& b) {
                  if (a.method_name != b.method_name) return a.method_name < b.method_name;
                  if (a.setting != b.setting) return a.setting < b.setting;
                  return a.data_volume < b.data_volume;
              });

    report.spec_echo = {
        {"volumes", spec.volumes},
        {"seed", spec.seed},
        {"source", spec.base_dataset ? to_string(spec.base_dataset->source) : "synthetic"},
        {"kmeans", {{"k", spec.kmeans.k}, {"quantile", spec.kmeans.quantile}}},
        {"iforest",
         {{"n_trees", spec.iforest.n_trees},
          {"subsample", spec.iforest.subsample},
          {"score_threshold", spec.iforest.score_threshold}}},
        {"dbscan", {{"eps", spec.dbscan.eps}, {"min_pts", spec.dbscan.min_pts}}},
    };
    auto setting_list = nlohmann::json::array();
    for (const auto& s : settings)
        setting_list.push_back({{"name", s.name},
                                {"d_c", s.params.d_c},
                                {"rho_min", s.params.rho_min},
                                {"delta_min", s.params.delta_min},
                                {"a_th", s.params.a_th},
                                {"score_mode", to_string(s.params.score_mode)}});
    report.spec_echo["dpc_settings"] = std::move(setting_list);
    return report;
}

std::string sweep_to_csv(const SweepReport& report) {
    std::ostringstream out;
    out << "method,setting,volume,tp,tn,fp,fn,accuracy,g_mean,fpr,seed\n";
    for (const auto& c : report.cells) {
        out << c.method_name << ',' << c.setting << ',' << c.data_volume << ',';
        if (c.status == "ok") {
            out << c.confusion.tp << ',' << c.confusion.tn << ',' << c.confusion.fp << ','
                << c.confusion.fn << ',' << format_double(c.accuracy) << ','
                << format_double(c.g_mean) << ',' << format_double(c.fpr);
        } else {
            out << ",,,,,,"; // failed cell: counts and metrics left empty
        }
        out << ',' << c.seed << '\n';
    }
    return out.str();
}

std::string sweep_metric_csv(const SweepReport& report, const std::string& metric) {
    std::ostringstream out;
    out << "method,setting,volume," << metric << ",seed\n";
    for (const auto& c : report.cells) {
        double value = 0.0;
        if (metric == "accuracy") value = c.accuracy;
        else if (metric == "g_mean") value = c.g_mean;
        else if (metric == "fpr") value = c.fpr;
        else throw ConfigError("unknown metric '" + metric + "'");
        out << c.method_name << ',' << c.setting << ',' << c.data_volume << ',';
        if (c.status == "ok") out << format_double(value);
        out << ',' << c.seed << '\n';
    }
    return out.str();
}

nlohmann::json sweep_to_json(const SweepReport& report) {
    nlohmann::json doc;
    doc["spec"] = report.spec_echo;
    auto cells = nlohmann::json::array();
    for (const auto& c : report.cells) {
        cells.push_back({{"method", c.method_name},
                         {"setting", c.setting},
                         {"volume", c.data_volume},
                         {"tp", c.confusion.tp},
                         {"tn", c.confusion.tn},
                         {"fp", c.confusion.fp},
                         {"fn", c.confusion.fn},
                         {"accuracy", c.accuracy},
                         {"g_mean", c.g_mean},
                         {"fpr", c.fpr},
                         {"degenerate_rates", c.degenerate_rates},
                         {"seed", c.seed},
                         {"status", c.status},
                         {"params", c.params_echo}});
    }
    doc["cells"] = std::move(cells);
    return doc;
}

} // namespace flowsense

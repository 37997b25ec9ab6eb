#include "flowsense/commands.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include "flowsense/error.hpp"
#include "flowsense/format.hpp"
#include "flowsense/rng.hpp"

namespace flowsense {

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write file: " + path.string());
    out << text;
}

std::filesystem::path ensure_out_dir(const RunConfig& config) {
    std::filesystem::path dir(config.out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create output directory: " + dir.string());
    return dir;
}

SynthConfig resolved_synth(const RunConfig& config) {
    SynthConfig synth = config.synth;
    synth.seed = SeededRng(config.seed).child("dataset").seed();
    return synth;
}

} // namespace

LabeledDataset load_configured_dataset(const RunConfig& config) {
    if (config.source == "synthetic") return generate_synthetic(resolved_synth(config));
    if (config.source == "csv") return load_dataset_csv(config.path);

    const RawTable table = config.source == "nsl-kdd" ? load_nsl_kdd(config.path)
                                                      : load_unsw_nb15(config.path);
    return encode(table, infer_encoding(table));
}

void cmd_synth(const RunConfig& config, std::ostream& log) {
    const auto dir = ensure_out_dir(config);
    const auto dataset = generate_synthetic(resolved_synth(config));

    const auto path = dir / "dataset.csv";
    write_dataset_csv(dataset, path);

    std::size_t anomalies = 0;
    for (Label l : dataset.labels)
        if (l == Label::Anomaly) ++anomalies;
    log << "wrote " << path.string() << ": " << dataset.size() << " rows ("
        << dataset.size() - anomalies << " normal, " << anomalies << " anomalous), "
        << dataset.dim() << " features\n";
}

void cmd_detect(const RunConfig& config, std::ostream& log) {
    const auto dir = ensure_out_dir(config);
    const auto dataset = load_configured_dataset(config);
    log << "loaded " << dataset.size() << " rows x " << dataset.dim() << " features from "
        << to_string(dataset.source) << "\n";

    Preprocessed prep;
    if (config.mode == "window")
        prep = preprocess_windows(dataset, config.window, config.top_k, config.preprocess);
    else
        prep = preprocess_records(dataset, config.preprocess);
    log << "detector input: " << prep.features.rows() << " samples x "
        << prep.features.cols() << " dims";
    if (prep.pca_dim > 0) log << " (after projection)";
    log << "\n";

    DetectorVerdict verdict;
    nlohmann::json results;
    if (config.detector == "dpc") {
        const auto result = detect_batched(prep.features, config.dpc);
        verdict = dpc_verdict(result);
        results = dpc_to_json(result);
        std::ostringstream csv;
        write_dpc_csv(result, csv);
        write_text(dir / "results.csv", csv.str());
    } else {
        if (config.detector == "kmeans") {
            KMeansConfig cfg = config.kmeans;
            cfg.seed = SeededRng(config.seed).child("kmeans").seed();
            verdict = kmeans_detect(prep.features, cfg);
        } else if (config.detector == "iforest") {
            IForestConfig cfg = config.iforest;
            cfg.seed = SeededRng(config.seed).child("iforest").seed();
            verdict = iforest_detect(prep.features, cfg);
        } else {
            verdict = dbscan_detect(prep.features, config.dbscan);
        }
        results = verdict_to_json(verdict);
        std::ostringstream csv;
        write_verdict_csv(verdict, csv);
        write_text(dir / "results.csv", csv.str());
    }
    write_text(dir / "results.json", results.dump(2) + "\n");

    const auto report =
        make_report(verdict, prep.labels, "detect", prep.labels.size(), config.seed);
    nlohmann::json metrics = {{"method", report.method_name},
                              {"tp", report.confusion.tp},
                              {"tn", report.confusion.tn},
                              {"fp", report.confusion.fp},
                              {"fn", report.confusion.fn},
                              {"accuracy", report.accuracy},
                              {"g_mean", report.g_mean},
                              {"fpr", report.fpr},
                              {"degenerate_rates", report.degenerate_rates},
                              {"samples", prep.labels.size()}};
    write_text(dir / "metrics.json", metrics.dump(2) + "\n");

    std::size_t flagged = 0;
    for (bool b : verdict.is_anomaly)
        if (b) ++flagged;
    log << config.detector << " flagged " << flagged << "/" << verdict.size()
        << " points; accuracy " << format_double(report.accuracy) << ", g-mean "
        << format_double(report.g_mean) << ", fpr " << format_double(report.fpr) << "\n";
    log << "wrote " << (dir / "results.json").string() << ", "
        << (dir / "results.csv").string() << ", " << (dir / "metrics.json").string()
        << "\n";
}

void cmd_sweep(const RunConfig& config, std::ostream& log) {
    const auto dir = ensure_out_dir(config);

    SweepSpec spec;
    spec.volumes = config.sweep_volumes;
    spec.dpc_settings = config.sweep_settings;
    spec.kmeans = config.kmeans;
    spec.iforest = config.iforest;
    spec.dbscan = config.dbscan;
    spec.synth_template = config.synth;
    spec.preprocess = config.preprocess;
    spec.seed = config.seed;
    if (config.source != "synthetic") spec.base_dataset = load_configured_dataset(config);

    const auto report = run_sweep(spec);

    write_text(dir / "sweep.csv", sweep_to_csv(report));
    for (const char* metric : {"accuracy", "g_mean", "fpr"})
        write_text(dir / (std::string("sweep_") + metric + ".csv"),
                   sweep_metric_csv(report, metric));
    write_text(dir / "sweep.json", sweep_to_json(report).dump(2) + "\n");

    std::size_t failed = 0;
    for (const auto& c : report.cells)
        if (c.status != "ok") ++failed;
    log << "sweep complete: " << report.cells.size() << " cells";
    if (failed > 0) log << " (" << failed << " failed)";
    log << "; wrote " << (dir / "sweep.csv").string() << " and per-metric files\n";
}

void cmd_validate(const RunConfig& config, std::ostream& log) {
    log << config_to_json(config).dump(2) << "\n";
}

} // namespace flowsense

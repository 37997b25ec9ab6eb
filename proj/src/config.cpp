#include "flowsense/config.hpp"

#include <fstream>
#include <set>

#include "flowsense/error.hpp"

namespace flowsense {

namespace {

void check_keys(const nlohmann::json& obj, const std::string& prefix,
                const std::set<std::string>& allowed) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (!allowed.contains(key))
            throw ConfigError("unknown configuration key '" +
                              (prefix.empty() ? key : prefix + "." + key) + "'");
    }
}

template <typename T>
void read(const nlohmann::json& obj, const char* key, T& out) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(std::string("invalid value for configuration key '") + key + "'");
    }
}

void require(bool ok, const std::string& message) {
    if (!ok) throw ConfigError(message);
}

} // namespace

RunConfig config_from_json(const nlohmann::json& doc) {
    RunConfig cfg;
    if (doc.is_null()) return cfg;
    if (!doc.is_object())
        throw ConfigError("configuration root must be a JSON object");

    check_keys(doc, "", {"seed", "out", "dataset", "mode", "window", "preprocess",
                         "detector", "dpc", "kmeans", "iforest", "dbscan", "sweep"});

    read(doc, "seed", cfg.seed);
    read(doc, "out", cfg.out_dir);
    read(doc, "mode", cfg.mode);
    read(doc, "detector", cfg.detector);

    if (doc.contains("dataset")) {
        const auto& d = doc["dataset"];
        check_keys(d, "dataset", {"source", "path", "synth"});
        read(d, "source", cfg.source);
        read(d, "path", cfg.path);
        if (d.contains("synth")) {
            const auto& s = d["synth"];
            check_keys(s, "dataset.synth",
                       {"n_normal", "n_anomaly", "dims", "n_clusters", "cluster_spread",
                        "outlier_low", "outlier_high"});
            read(s, "n_normal", cfg.synth.n_normal);
            read(s, "n_anomaly", cfg.synth.n_anomaly);
            read(s, "dims", cfg.synth.dims);
            read(s, "n_clusters", cfg.synth.n_clusters);
            read(s, "cluster_spread", cfg.synth.cluster_spread);
            read(s, "outlier_low", cfg.synth.outlier_low);
            read(s, "outlier_high", cfg.synth.outlier_high);
        }
    }

    if (doc.contains("window")) {
        const auto& w = doc["window"];
        check_keys(w, "window", {"length", "stride", "top_k"});
        read(w, "length", cfg.window.length);
        cfg.window.stride = cfg.window.length; // tumbling unless overridden
        read(w, "stride", cfg.window.stride);
        read(w, "top_k", cfg.top_k);
    }

    if (doc.contains("preprocess")) {
        const auto& p = doc["preprocess"];
        check_keys(p, "preprocess", {"minmax", "pca", "variance_target", "max_components"});
        read(p, "minmax", cfg.preprocess.use_minmax);
        read(p, "pca", cfg.preprocess.use_pca);
        read(p, "variance_target", cfg.preprocess.variance_target);
        read(p, "max_components", cfg.preprocess.max_components);
    }

    if (doc.contains("dpc")) {
        const auto& p = doc["dpc"];
        check_keys(p, "dpc",
                   {"d_c", "rho_min", "delta_min", "a_th", "score_mode", "batch_cap"});
        read(p, "d_c", cfg.dpc.d_c);
        read(p, "rho_min", cfg.dpc.rho_min);
        read(p, "delta_min", cfg.dpc.delta_min);
        read(p, "a_th", cfg.dpc.a_th);
        read(p, "batch_cap", cfg.dpc.batch_cap);
        if (p.contains("score_mode"))
            cfg.dpc.score_mode = score_mode_from_string(p["score_mode"].get<std::string>());
    }

    if (doc.contains("kmeans")) {
        const auto& p = doc["kmeans"];
        check_keys(p, "kmeans", {"k", "max_iters", "quantile"});
        read(p, "k", cfg.kmeans.k);
        read(p, "max_iters", cfg.kmeans.max_iters);
        read(p, "quantile", cfg.kmeans.quantile);
    }

    if (doc.contains("iforest")) {
        const auto& p = doc["iforest"];
        check_keys(p, "iforest", {"n_trees", "subsample", "score_threshold"});
        read(p, "n_trees", cfg.iforest.n_trees);
        read(p, "subsample", cfg.iforest.subsample);
        read(p, "score_threshold", cfg.iforest.score_threshold);
    }

    if (doc.contains("dbscan")) {
        const auto& p = doc["dbscan"];
        check_keys(p, "dbscan", {"eps", "min_pts"});
        read(p, "eps", cfg.dbscan.eps);
        read(p, "min_pts", cfg.dbscan.min_pts);
    }

    if (doc.contains("sweep")) {
        const auto& s = doc["sweep"];
        check_keys(s, "sweep", {"volumes", "settings"});
        read(s, "volumes", cfg.sweep_volumes);
        if (s.contains("settings")) {
            cfg.sweep_settings.clear();
            for (const auto& item : s["settings"]) {
                check_keys(item, "sweep.settings",
                           {"name", "d_c", "rho_min", "delta_min", "a_th", "score_mode"});
                DpcSetting setting;
                setting.params = cfg.dpc;
                read(item, "name", setting.name);
                read(item, "d_c", setting.params.d_c);
                read(item, "rho_min", setting.params.rho_min);
                read(item, "delta_min", setting.params.delta_min);
                read(item, "a_th", setting.params.a_th);
                if (item.contains("score_mode"))
                    setting.params.score_mode =
                        score_mode_from_string(item["score_mode"].get<std::string>());
                require(!setting.name.empty(), "sweep settings need non-empty names");
                cfg.sweep_settings.push_back(std::move(setting));
            }
        }
    }

    // Range checks. The loaders and detectors re-validate at use; failing
    // here gives the user one early, complete pass.
    require(cfg.source == "synthetic" || cfg.source == "nsl-kdd" ||
                cfg.source == "unsw-nb15" || cfg.source == "csv",
            "dataset.source must be synthetic|nsl-kdd|unsw-nb15|csv");
    require(cfg.mode == "record" || cfg.mode == "window", "mode must be record|window");
    require(cfg.detector == "dpc" || cfg.detector == "kmeans" ||
                cfg.detector == "iforest" || cfg.detector == "dbscan",
            "detector must be dpc|kmeans|iforest|dbscan");
    require(cfg.synth.n_normal >= 1, "dataset.synth.n_normal must be >= 1");
    require(cfg.synth.n_anomaly <= cfg.synth.n_normal,
            "dataset.synth.n_anomaly must not exceed n_normal");
    require(cfg.synth.dims >= 1, "dataset.synth.dims must be >= 1");
    require(cfg.synth.n_clusters >= 1, "dataset.synth.n_clusters must be >= 1");
    require(cfg.synth.cluster_spread > 0, "dataset.synth.cluster_spread must be > 0");
    require(cfg.synth.outlier_low <= cfg.synth.outlier_high,
            "dataset.synth.outlier_low must not exceed outlier_high");
    require(cfg.window.length >= 3, "window.length must be >= 3");
    require(cfg.window.stride >= 1, "window.stride must be >= 1");
    require(cfg.top_k >= 1, "window.top_k must be >= 1");
    require(cfg.preprocess.variance_target > 0 && cfg.preprocess.variance_target <= 1,
            "preprocess.variance_target must lie in (0, 1]");
    require(cfg.preprocess.max_components >= 1, "preprocess.max_components must be >= 1");
    require(cfg.dpc.d_c > 0, "dpc.d_c must be > 0");
    require(cfg.dpc.rho_min >= 0, "dpc.rho_min must be >= 0");
    require(cfg.dpc.delta_min >= 0, "dpc.delta_min must be >= 0");
    require(cfg.dpc.a_th > 0, "dpc.a_th must be > 0");
    require(cfg.dpc.batch_cap >= 1, "dpc.batch_cap must be >= 1");
    require(cfg.kmeans.k >= 1, "kmeans.k must be >= 1");
    require(cfg.kmeans.max_iters >= 1, "kmeans.max_iters must be >= 1");
    require(cfg.kmeans.quantile > 0 && cfg.kmeans.quantile <= 1,
            "kmeans.quantile must lie in (0, 1]");
    require(cfg.iforest.n_trees >= 1, "iforest.n_trees must be >= 1");
    require(cfg.iforest.subsample >= 2, "iforest.subsample must be >= 2");
    require(cfg.iforest.score_threshold > 0 && cfg.iforest.score_threshold <= 1,
            "iforest.score_threshold must lie in (0, 1]");
    require(cfg.dbscan.eps > 0, "dbscan.eps must be > 0");
    require(!cfg.sweep_volumes.empty(), "sweep.volumes must be non-empty");
    for (std::size_t v : cfg.sweep_volumes)
        require(v >= 2, "sweep.volumes entries must be >= 2");
    for (const auto& s : cfg.sweep_settings) {
        require(s.params.d_c > 0, "sweep setting '" + s.name + "': d_c must be > 0");
        require(s.params.a_th > 0, "sweep setting '" + s.name + "': a_th must be > 0");
    }
    return cfg;
}

nlohmann::json config_to_json(const RunConfig& cfg) {
    nlohmann::json doc;
    doc["seed"] = cfg.seed;
    doc["out"] = cfg.out_dir;
    doc["dataset"] = {{"source", cfg.source},
                      {"path", cfg.path},
                      {"synth",
                       {{"n_normal", cfg.synth.n_normal},
                        {"n_anomaly", cfg.synth.n_anomaly},
                        {"dims", cfg.synth.dims},
                        {"n_clusters", cfg.synth.n_clusters},
                        {"cluster_spread", cfg.synth.cluster_spread},
                        {"outlier_low", cfg.synth.outlier_low},
                        {"outlier_high", cfg.synth.outlier_high}}}};
    doc["mode"] = cfg.mode;
    doc["window"] = {{"length", cfg.window.length},
                     {"stride", cfg.window.stride},
                     {"top_k", cfg.top_k}};
    doc["preprocess"] = {{"minmax", cfg.preprocess.use_minmax},
                         {"pca", cfg.preprocess.use_pca},
                         {"variance_target", cfg.preprocess.variance_target},
                         {"max_components", cfg.preprocess.max_components}};
    doc["detector"] = cfg.detector;
    doc["dpc"] = {{"d_c", cfg.dpc.d_c},
                  {"rho_min", cfg.dpc.rho_min},
                  {"delta_min", cfg.dpc.delta_min},
                  {"a_th", cfg.dpc.a_th},
                  {"score_mode", to_string(cfg.dpc.score_mode)},
                  {"batch_cap", cfg.dpc.batch_cap}};
    doc["kmeans"] = {{"k", cfg.kmeans.k},
                     {"max_iters", cfg.kmeans.max_iters},
                     {"quantile", cfg.kmeans.quantile}};
    doc["iforest"] = {{"n_trees", cfg.iforest.n_trees},
                      {"subsample", cfg.iforest.subsample},
                      {"score_threshold", cfg.iforest.score_threshold}};
    doc["dbscan"] = {{"eps", cfg.dbscan.eps}, {"min_pts", cfg.dbscan.min_pts}};

    auto settings = nlohmann::json::array();
    const auto resolved =
        cfg.sweep_settings.empty() ? SweepSpec::default_settings() : cfg.sweep_settings;
    for (const auto& s : resolved)
        settings.push_back({{"name", s.name},
                            {"d_c", s.params.d_c},
                            {"rho_min", s.params.rho_min},
                            {"delta_min", s.params.delta_min},
                            {"a_th", s.params.a_th},
                            {"score_mode", to_string(s.params.score_mode)}});
    doc["sweep"] = {{"volumes", cfg.sweep_volumes}, {"settings", std::move(settings)}};
    return doc;
}

void apply_override(nlohmann::json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("override must look like key.path=value: '" + assignment + "'");

    const std::string path = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);

    nlohmann::json value = nlohmann::json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw; // plain string

    nlohmann::json* node = &doc;
    std::size_t start = 0;
    while (true) {
        const auto dot = path.find('.', start);
        const std::string key = path.substr(start, dot - start);
        if (key.empty())
            throw ConfigError("empty key segment in override '" + assignment + "'");
        if (dot == std::string::npos) {
            (*node)[key] = std::move(value);
            break;
        }
        node = &(*node)[key];
        start = dot + 1;
    }
}

RunConfig load_config(const std::string& config_path,
                      const std::vector<std::string>& overrides) {
    nlohmann::json doc = nlohmann::json::object();
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in)
            throw ConfigError("cannot open config file: " + config_path);
        doc = nlohmann::json::parse(in, nullptr, false);
        if (doc.is_discarded())
            throw ConfigError("config file is not valid JSON: " + config_path);
    }
    for (const auto& o : overrides) apply_override(doc, o);

    RunConfig cfg = config_from_json(doc);

    const bool needs_path =
        cfg.source == "nsl-kdd" || cfg.source == "unsw-nb15" || cfg.source == "csv";
    if (needs_path) {
        if (cfg.path.empty())
            throw ConfigError("dataset.path is required for source '" + cfg.source + "'");
        if (!std::filesystem::exists(cfg.path))
            throw ConfigError("dataset.path does not exist: " + cfg.path);
    }
    return cfg;
}

} // namespace flowsense

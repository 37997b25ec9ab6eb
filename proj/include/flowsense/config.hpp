#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "flowsense/baselines.hpp"
#include "flowsense/dataset.hpp"
#include "flowsense/dpc.hpp"
#include "flowsense/eval.hpp"
#include "flowsense/features.hpp"
#include "flowsense/pipeline.hpp"

#include <json.hpp>

namespace flowsense {

// Single source of truth for a run. Every field defaults to the reference
// experimental setup; a JSON config file and dotted --set overrides adjust
// individual keys. One root seed drives all randomness through named
// sub-streams (dataset, kmeans, iforest), so adding one consumer never
// shifts another's draws.
struct RunConfig {
    std::uint64_t seed = 42;
    std::string out_dir = "out";

    std::string source = "synthetic"; // synthetic | nsl-kdd | unsw-nb15 | csv
    std::string path;                 // dataset file for file-backed sources
    SynthConfig synth;                // seed field is derived from the root seed

    std::string mode = "record"; // record | window
    WindowConfig window = {32, 32};
    std::size_t top_k = 5;

    PreprocessOptions preprocess;

    std::string detector = "dpc"; // dpc | kmeans | iforest | dbscan
    DpcParams dpc;
    KMeansConfig kmeans;
    IForestConfig iforest;
    DbscanConfig dbscan;

    std::vector<std::size_t> sweep_volumes = {1000, 2000, 5000, 10000};
    std::vector<DpcSetting> sweep_settings; // empty selects the built-in three
};

// Parses and validates; unknown keys and out-of-range values raise
// ConfigError naming the offending key.
RunConfig config_from_json(const nlohmann::json& doc);

// Fully resolved configuration (defaults filled in).
nlohmann::json config_to_json(const RunConfig& config);

// Applies one dotted-path override, e.g. "dpc.d_c=0.2" or
// "sweep.volumes=[500,1000]". Values parse as JSON when possible and as
// strings otherwise.
void apply_override(nlohmann::json& doc, const std::string& assignment);

// Reads the config file (or starts from defaults when path is empty),
// applies overrides in order, validates, and checks referenced paths.
RunConfig load_config(const std::string& config_path,
                      const std::vector<std::string>& overrides);

} // namespace flowsense

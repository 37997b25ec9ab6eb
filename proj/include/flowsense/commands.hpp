#pragma once

#include <iosfwd>

#include "flowsense/config.hpp"

namespace flowsense {

// Command implementations behind the CLI. Each writes its artifacts under
// config.out_dir and logs progress to `log`. Errors surface as exceptions;
// the CLI maps ConfigError/ParseError/IoError to exit code 2 and everything
// else to 1.

// Writes the configured synthetic dataset as dataset.csv.
void cmd_synth(const RunConfig& config, std::ostream& log);

// Full pipeline: ingest, optional window features, min-max, PCA, detector.
// Writes results.json, results.csv, and metrics.json.
void cmd_detect(const RunConfig& config, std::ostream& log);

// Volume x method x setting grid. Writes sweep.csv, one per-metric CSV for
// accuracy / g_mean / fpr, and sweep.json.
void cmd_sweep(const RunConfig& config, std::ostream& log);

// Prints the resolved configuration (defaults filled in).
void cmd_validate(const RunConfig& config, std::ostream& log);

// Loads the dataset named by the config: synthetic generation or a file
// loader plus encoding, depending on source.
LabeledDataset load_configured_dataset(const RunConfig& config);

} // namespace flowsense

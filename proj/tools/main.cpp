#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "flowsense/commands.hpp"
#include "flowsense/error.hpp"

namespace {

bool use_color() {
    if (std::getenv("NO_COLOR") != nullptr) return false;
    return isatty(fileno(stderr)) != 0;
}

void print_error(const std::string& message) {
    if (use_color())
        std::cerr << "\033[31merror:\033[0m " << message << "\n";
    else
        std::cerr << "error: " << message << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"unsupervised anomaly detection for data streams: density-peaks "
                 "clustering over statistical and spectral features, with K-Means, "
                 "Isolation Forest, and DBSCAN baselines"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir;
    std::int64_t seed = -1;

    app.add_option("-c,--config", config_path, "JSON configuration file");
    app.add_option("-s,--set", overrides,
                   "override one config key, dotted path (e.g. dpc.d_c=0.2)");
    app.add_option("-o,--out", out_dir, "output directory (overrides config)");
    app.add_option("--seed", seed, "root seed (overrides config)");

    auto* synth = app.add_subcommand("synth", "generate a labeled synthetic dataset");
    auto* detect = app.add_subcommand("detect", "run one detector over one dataset");
    auto* sweep = app.add_subcommand("sweep", "run the volume x method x setting grid");
    auto* validate = app.add_subcommand("validate", "check and echo the configuration");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (!out_dir.empty()) overrides.push_back("out=" + out_dir);
        if (seed >= 0) overrides.push_back("seed=" + std::to_string(seed));
        const flowsense::RunConfig config = flowsense::load_config(config_path, overrides);

        if (synth->parsed()) flowsense::cmd_synth(config, std::cout);
        else if (detect->parsed()) flowsense::cmd_detect(config, std::cout);
        else if (sweep->parsed()) flowsense::cmd_sweep(config, std::cout);
        else if (validate->parsed()) flowsense::cmd_validate(config, std::cout);
        return 0;
    } catch (const flowsense::ConfigError& e) {
        print_error(e.what());
        return 2;
    } catch (const flowsense::ParseError& e) {
        print_error(e.what());
        return 2;
    } catch (const flowsense::IoError& e) {
        print_error(e.what());
        return 2;
    } catch (const std::exception& e) {
        print_error(e.what());
        return 1;
    }
}

#ifndef FLOODBAYES_TOOLS_PIPELINE_HPP
#define FLOODBAYES_TOOLS_PIPELINE_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace floodbayes::cli {

/// Everything a full run needs; also the schema of --config files. Output
/// locations live in out_dir; all other fields shape the analysis and are
/// echoed into the run manifest.
struct RunConfig {
    std::string stage_csv;
    std::string index_csv;
    std::string station_meta; // optional

    int start_month = 6;
    int end_month = 11;
    int min_length = 10;
    double alpha = 0.05;

    std::vector<std::string> priors{"uniform", "gauss-wide", "gauss-narrow"};
    std::string structure = "auto";
    std::int64_t iterations = 100000;
    std::int64_t burn_in = 10000;

    std::vector<double> periods{2, 5, 10, 25, 50, 100};
    std::string covariate_ref = "last-year";
    double interval_mass = 0.9;
    std::size_t parameter_scenarios = 1000;
    std::vector<std::string> measures{"range", "variance"};
    std::size_t ensemble_thin = 10;

    bool seed_set = false;
    std::uint64_t seed = 0;
    std::string out_dir = ".";
};

/// Merge fields present in a config JSON file into defaults.
RunConfig load_run_config(const std::filesystem::path& path, RunConfig base = {});

/// Config echo for manifests and summaries; omits out_dir so runs into
/// different directories stay byte-comparable.
nlohmann::json config_echo(const RunConfig& config);

/// Full pipeline: ingest, assess, per-cell chains, levels, equivalent return
/// period, sensitivity decomposition, manifest. Returns the process exit code.
int run_report(const RunConfig& config);

} // namespace floodbayes::cli

namespace floodbayes {
struct AlignedDataset;
}

namespace floodbayes::cli {

/// Fit the (prior, structure) cells and write sensitivity.csv plus
/// sensitivity.json into config.out_dir. Returns the written file names.
std::vector<std::string> run_sensitivity(const AlignedDataset& dataset,
                                         const RunConfig& config);

} // namespace floodbayes::cli

#endif

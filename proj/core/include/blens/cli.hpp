#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace blens {

// One batch run: a command id plus the knobs shared by every command. Values
// given on the command line land in `overrides` as strings and take
// precedence over the JSON config file, which takes precedence over
// per-command defaults.
struct ExperimentConfig {
    std::string command;
    std::string config_path;   // optional JSON file of named parameters
    std::string out_dir = "."; // reports and CSV artifacts land here
    std::uint64_t seed = 0;
    unsigned threads = 0;  // 0 = library default
    std::map<std::string, std::string> overrides;
};

// Runs one command and writes <out>/<command>.json plus CSV artifacts.
// Returns 0 on success, 2 on a validation error, 3 on a numeric contract
// violation; failures also write an error report with a reason string.
// Identical config and seed reproduce the reports byte for byte.
int run_experiment(const ExperimentConfig& config);

}  // namespace blens

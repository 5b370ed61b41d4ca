#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace meanvalue {

struct ExperimentConfig {
    std::string id;
    std::map<std::string, double> params;
    std::string out_dir = "meanvalue-out";
    std::uint64_t seed = 20240901;
};

struct ExperimentResult {
    std::string id;
    bool pass = true;
    std::vector<std::string> artifacts;  // paths of CSV files written
    std::vector<std::string> lines;      // summary and assertion outcomes
};

/// Runs one named experiment (or "all") and writes its CSV artifacts under
/// config.out_dir. Unknown ids raise invalid_argument listing the valid ones.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// (id, one-line description) for every runnable experiment.
const std::vector<std::pair<std::string, std::string>>& experiment_catalog();

}  // namespace meanvalue

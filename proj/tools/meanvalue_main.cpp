#include <cstdint>
#include <fstream>
#include <map>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "meanvalue/experiments.hpp"

namespace {

int parse_param(const std::string& text, std::map<std::string, double>& params) {
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0) {
        std::cerr << "error: --param expects key=value, got '" << text << "'\n";
        return 2;
    }
    try {
        params[text.substr(0, eq)] = std::stod(text.substr(eq + 1));
    } catch (const std::exception&) {
        std::cerr << "error: --param value in '" << text << "' is not a number\n";
        return 2;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"meanvalue: a numerical laboratory for long-run values of controlled systems"};
    app.require_subcommand(1);

    auto* list_cmd = app.add_subcommand("list", "print the experiment ids");

    auto* run_cmd = app.add_subcommand("run", "run one experiment (or 'all')");
    std::string id;
    run_cmd->add_option("experiment", id, "experiment id")->required();
    std::vector<std::string> param_args;
    run_cmd->add_option("--param", param_args, "parameter override key=value (repeatable)");
    std::string out_dir;
    run_cmd->add_option("--out", out_dir, "output directory for CSV artifacts");
    std::uint64_t seed = 0;
    run_cmd->add_option("--seed", seed, "seed for the randomized sweeps");
    std::string config_path;
    run_cmd->add_option("--config", config_path, "JSON config file (CLI flags override it)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (list_cmd->parsed()) {
        for (const auto& [eid, desc] : meanvalue::experiment_catalog())
            std::cout << eid << " - " << desc << "\n";
        return 0;
    }

    meanvalue::ExperimentConfig config;
    config.id = id;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) {
            std::cerr << "error: cannot read config file '" << config_path << "'\n";
            return 2;
        }
        try {
            nlohmann::json j;
            in >> j;
            if (j.contains("out")) config.out_dir = j.at("out").get<std::string>();
            if (j.contains("seed")) config.seed = j.at("seed").get<std::uint64_t>();
            if (j.contains("params"))
                for (const auto& [key, val] : j.at("params").items())
                    config.params[key] = val.get<double>();
        } catch (const std::exception& e) {
            std::cerr << "error: malformed config file: " << e.what() << "\n";
            return 2;
        }
    }
    if (run_cmd->count("--out") > 0) config.out_dir = out_dir;
    if (run_cmd->count("--seed") > 0) config.seed = seed;
    for (const std::string& p : param_args)
        if (const int rc = parse_param(p, config.params)) return rc;

    try {
        const meanvalue::ExperimentResult result = meanvalue::run_experiment(config);
        for (const auto& line : result.lines) std::cout << line << "\n";
        for (const auto& artifact : result.artifacts) std::cout << "wrote " << artifact << "\n";
        std::cout << (result.pass ? "PASS" : "FAIL") << " " << result.id << "\n";
        return result.pass ? 0 : 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

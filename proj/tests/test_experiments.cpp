#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "meanvalue/experiments.hpp"

using namespace meanvalue;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag)
        : path(fs::temp_directory_path() / ("meanvalue-test-" + tag)) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("catalog lists every id exactly once") {
    const auto& catalog = experiment_catalog();
    CHECK(catalog.size() == 11);
    for (std::size_t i = 0; i < catalog.size(); ++i) {
        CHECK_FALSE(catalog[i].second.empty());
        for (std::size_t j = i + 1; j < catalog.size(); ++j)
            CHECK(catalog[i].first != catalog[j].first);
    }
    CHECK(catalog.back().first == "all");
}

TEST_CASE("unknown ids are rejected with the valid list") {
    ExperimentConfig config;
    config.id = "no-such-experiment";
    try {
        run_experiment(config);
        FAIL("expected invalid_argument");
    } catch (const std::invalid_argument& err) {
        const std::string msg = err.what();
        CHECK(msg.find("no-such-experiment") != std::string::npos);
        CHECK(msg.find("tv-curves") != std::string::npos);
    }
}

TEST_CASE("replays are byte identical") {
    TempDir a("replay-a"), b("replay-b");
    ExperimentConfig config;
    config.id = "tv-curves";
    config.out_dir = a.path.string();
    const ExperimentResult first = run_experiment(config);
    config.out_dir = b.path.string();
    const ExperimentResult second = run_experiment(config);

    CHECK(first.pass);
    CHECK(second.pass);
    REQUIRE(first.artifacts.size() == second.artifacts.size());
    REQUIRE_FALSE(first.artifacts.empty());
    for (std::size_t i = 0; i < first.artifacts.size(); ++i) {
        CHECK(fs::path(first.artifacts[i]).filename() ==
              fs::path(second.artifacts[i]).filename());
        CHECK(slurp(first.artifacts[i]) == slurp(second.artifacts[i]));
    }
    CHECK(first.lines == second.lines);
}

TEST_CASE("artifacts land in the requested directory") {
    TempDir dir("artifacts");
    ExperimentConfig config;
    config.id = "discrete-link";
    config.out_dir = dir.path.string();
    const ExperimentResult result = run_experiment(config);
    CHECK(result.pass);
    REQUIRE_FALSE(result.artifacts.empty());
    for (const auto& artifact : result.artifacts) {
        const fs::path p(artifact);
        CHECK(fs::exists(p));
        CHECK(p.parent_path() == dir.path);
        CHECK(p.extension() == ".csv");
        // Every artifact starts with a header row.
        const std::string content = slurp(p);
        CHECK_FALSE(content.empty());
        CHECK(content.find(',') != std::string::npos);
        CHECK(content.find(',') < content.find('\n'));
    }
}

TEST_CASE("parameters reach the experiment") {
    TempDir coarse("param-coarse"), fine("param-fine");
    ExperimentConfig config;
    config.id = "ltc-families";
    config.params["grid_n"] = 9.0;
    config.out_dir = coarse.path.string();
    config.params["k_max"] = 3.0;
    const ExperimentResult small = run_experiment(config);
    config.out_dir = fine.path.string();
    config.params["k_max"] = 6.0;
    const ExperimentResult large = run_experiment(config);
    CHECK(small.pass);
    CHECK(large.pass);
    // A larger family means more rows in the diagnostics table.
    REQUIRE(small.artifacts.size() == large.artifacts.size());
    CHECK(slurp(small.artifacts[0]).size() < slurp(large.artifacts[0]).size());
}

TEST_CASE("every experiment passes and reports at least one check") {
    TempDir dir("all");
    ExperimentConfig config;
    config.id = "all";
    config.out_dir = dir.path.string();
    const ExperimentResult result = run_experiment(config);
    CHECK(result.pass);
    CHECK_FALSE(result.artifacts.empty());
    for (const auto& [id, desc] : experiment_catalog()) {
        if (id == "all") continue;
        bool mentioned = false;
        for (const auto& line : result.lines)
            mentioned = mentioned || line.rfind("[" + id + "]", 0) == 0;
        CHECK_MESSAGE(mentioned, "no summary line for ", id);
    }
    for (const auto& line : result.lines) CHECK(line.find("FAIL") == std::string::npos);
}

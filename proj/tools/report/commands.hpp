#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "output.hpp"

namespace blockprop::report {

struct Options {
    std::filesystem::path out = ".";
    std::optional<std::uint64_t> seed;
    std::optional<std::string> format;
    std::optional<std::string> recipe;
};

struct CommandResult {
    int exit_code = 0;
    std::vector<std::filesystem::path> files;
    /// Human-readable digest printed by the CLI.
    std::string summary;
};

/// Folds command-line overrides into the configuration.
RunConfig with_options(RunConfig cfg, const Options& opts);

CommandResult cmd_analyze(const RunConfig& cfg, const Options& opts);
CommandResult cmd_simulate(const RunConfig& cfg, const Options& opts);
CommandResult cmd_sweep(const RunConfig& cfg, const Options& opts);
CommandResult cmd_validate(const RunConfig& cfg, const Options& opts);

std::vector<std::string> recipe_names();

struct NamedTable {
    std::string stem;
    Table table;
};

/// Figure-data tables of one recipe, computed without touching the disk.
std::vector<NamedTable> run_recipe(const std::string& name, const RunConfig& cfg);

struct Check {
    std::string name;
    double analytic = 0.0;
    double empirical = 0.0;
    double std_error = 0.0;
    /// "z<=3", "rel<=0.02", or "info" for measurements that do not gate.
    std::string tolerance;
    bool pass = true;
};

struct ValidateSettings {
    long replications = 100'000;
    long race_replications = 1'000'000;
    std::uint64_t seed = 1;
    int threads = 0;
};

ValidateSettings validate_settings(const RunConfig& cfg);
std::vector<Check> run_validation(const ValidateSettings& settings);
Table checks_table(const std::vector<Check>& checks);

}  // namespace blockprop::report

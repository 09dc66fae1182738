#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "blockprop/params.hpp"
#include "report/commands.hpp"

using namespace blockprop;
using namespace blockprop::report;

int main(int argc, char** argv) {
    CLI::App app{"Markov-chain model of gossip block propagation, forking and security"};
    app.set_version_flag("--version", tool_version());
    app.require_subcommand(1);

    std::string config_path;
    Options opts;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    std::string format;
    std::string recipe;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON configuration file")->required();
        sub->add_option("--out", out_dir, "output directory")->required();
        sub->add_option("--seed", seed, "simulation seed (overrides the config)");
        sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--recipe", recipe, "sweep recipe name");
    };
    auto* analyze = app.add_subcommand("analyze", "closed-form metrics for every grid point");
    auto* simulate = app.add_subcommand("simulate", "gossip simulation for every grid point");
    auto* sweep = app.add_subcommand("sweep", "figure data for a named recipe");
    auto* validate = app.add_subcommand("validate", "analytic vs simulation cross-checks");
    for (auto* sub : {analyze, simulate, sweep, validate}) add_common(sub);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    opts.out = out_dir;
    for (auto* sub : {analyze, simulate, sweep, validate}) {
        if (sub->count("--seed")) opts.seed = seed;
        if (sub->count("--format")) opts.format = format;
        if (sub->count("--recipe")) opts.recipe = recipe;
    }

    try {
        const auto cfg = load_config(config_path);
        CommandResult result;
        if (*analyze) result = cmd_analyze(cfg, opts);
        else if (*simulate) result = cmd_simulate(cfg, opts);
        else if (*sweep) result = cmd_sweep(cfg, opts);
        else result = cmd_validate(cfg, opts);
        std::cout << result.summary << "\n";
        for (const auto& f : result.files) std::cout << "wrote " << f.string() << "\n";
        return result.exit_code;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ParameterError& e) {
        std::cerr << "parameter error: " << e.what() << "\n";
        return 2;
    } catch (const ConvergenceError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

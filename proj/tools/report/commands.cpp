#include "commands.hpp"

#include <iomanip>
#include <sstream>

#include "blockprop/gossip_sim.hpp"
#include "blockprop/rng.hpp"
#include "evaluate.hpp"

namespace blockprop::report {

namespace {

Header make_header(const std::string& command, const RunConfig& cfg) {
    return {command, config_hash(cfg), cfg.sim.seed, {}};
}

std::vector<Cell> point_cells(const GridPoint& p) {
    return {static_cast<long long>(p.chain.servers), static_cast<long long>(p.chain.fanout),
            p.net.data_rate_mbps, p.block_size_mb, p.net.block_time_s,
            static_cast<long long>(p.sec.confirmations), p.sec.adversary_share};
}

std::vector<std::string> point_columns() {
    return {"n", "k", "data_rate_mbps", "block_size_mb", "block_time_s", "confirmations", "adversary_share"};
}

std::vector<ChainParams> chains_of(const std::vector<GridPoint>& points) {
    std::vector<ChainParams> out;
    for (const auto& p : points) out.push_back(p.chain);
    return out;
}

std::string point_stem(std::size_t index) {
    std::ostringstream s;
    s << "point_" << std::setw(4) << std::setfill('0') << index;
    return s.str();
}

}  // namespace

RunConfig with_options(RunConfig cfg, const Options& opts) {
    if (opts.seed) cfg.sim.seed = *opts.seed;
    if (opts.format) {
        if (*opts.format != "csv" && *opts.format != "json") throw ConfigError("--format: expected csv or json");
        cfg.format = *opts.format;
    }
    if (opts.recipe) cfg.recipe = *opts.recipe;
    return cfg;
}

CommandResult cmd_analyze(const RunConfig& raw, const Options& opts) {
    const auto cfg = with_options(raw, opts);
    const auto points = cfg.points();
    ModelCache cache;
    cache.warm(chains_of(points), cfg.sim.threads);
    std::vector<PointMetrics> metrics(points.size());
    parallel_indices(points.size(), cfg.sim.threads, [&](std::size_t i) {
        metrics[i] = evaluate_point(*cache.get(points[i].chain), points[i]);
    });

    Table table;
    table.columns = point_columns();
    for (const char* c : {"t_p", "p_f", "p_k", "n_k", "theta", "theta_bound", "t_c", "t_c_bound", "FT", "p_m", "p_w"}) {
        table.columns.emplace_back(c);
    }
    CommandResult result;
    const auto header = make_header("analyze", cfg);
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& m = metrics[i];
        const auto& t = m.tradeoff;
        auto row = point_cells(points[i]);
        for (double v : {m.profile.total_delay, m.profile.failure_prob, t.forks.fork_prob, t.forks.expected_forks,
                         t.throughput, t.throughput_bound, t.confirm_delay, t.confirm_delay_bound,
                         t.fault_tolerance, t.p_modify, t.p_modify_unencrypted}) {
            row.emplace_back(v);
        }
        table.add(std::move(row));

        Table curve;
        curve.columns = {"informed", "time_s"};
        for (const auto& c : m.profile.curve) curve.add({static_cast<long long>(c.informed), c.time_s});
        auto h = header;
        h.extra = {{"point", std::to_string(i)},
                   {"n", std::to_string(points[i].chain.servers)},
                   {"k", std::to_string(points[i].chain.fanout)}};
        result.files.push_back(write_table(opts.out / "curves", point_stem(i), cfg.format, h, curve));
    }
    result.files.insert(result.files.begin(), write_table(opts.out, "analyze", cfg.format, header, table));
    result.summary = "analyzed " + std::to_string(points.size()) + " grid point(s)";
    return result;
}

CommandResult cmd_simulate(const RunConfig& raw, const Options& opts) {
    const auto cfg = with_options(raw, opts);
    const auto points = cfg.points();
    const auto mode = cfg.sim.mode;
    auto header = make_header("simulate", cfg);
    header.extra = {{"rng", std::string(Philox4x32::kName)},
                    {"mode", std::string(to_string(mode))},
                    {"replications", std::to_string(cfg.sim.replications)}};

    Table table;
    table.columns = point_columns();
    const auto add_cols = [&](std::initializer_list<const char*> cols) {
        for (const char* c : cols) table.columns.emplace_back(c);
    };
    switch (mode) {
        case SimMode::propagation:
            add_cols({"failure_freq", "failure_se", "delay_mean", "delay_se", "delay_q05", "delay_median", "delay_q95"});
            break;
        case SimMode::forking:
            add_cols({"failure_freq", "failure_se", "delay_mean", "delay_se", "fork_mean", "fork_se", "fork_freq",
                      "fork_freq_se"});
            break;
        case SimMode::failure_exit:
            add_cols({"failure_state", "attempts", "exit_time_mean", "exit_time_se"});
            break;
        case SimMode::race:
            add_cols({"p", "q", "win_freq", "win_se", "cap_hit_freq", "analytic_p_m"});
            break;
    }

    CommandResult result;
    Table origins;
    origins.columns = {"point", "origin", "freq", "freq_se"};
    ModelCache cache;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& pt = points[i];
        SimConfig sc{pt.chain, pt.net, cfg.sim.replications, cfg.sim.seed, mode};
        sc.threads = cfg.sim.threads;
        sc.failure_state = cfg.sim.failure_state;
        sc.exit_sampling = cfg.sim.exit_sampling;
        auto row = point_cells(pt);
        if (mode == SimMode::race) {
            const auto metrics = evaluate_point(*cache.get(pt.chain), pt);
            RaceConfig rc;
            rc.p = metrics.tradeoff.rates.p;
            rc.q = metrics.tradeoff.rates.q;
            rc.confirmations = pt.sec.confirmations;
            rc.replications = cfg.sim.replications;
            rc.seed = cfg.sim.seed;
            rc.step_cap = cfg.sim.race_step_cap;
            rc.threads = cfg.sim.threads;
            const auto rep = simulate_race(rc);
            for (double v : {rc.p, rc.q, rep.race_win_freq.mean, rep.race_win_freq.std_error, rep.race_cap_hit_freq,
                             metrics.tradeoff.p_modify}) {
                row.emplace_back(v);
            }
            table.add(std::move(row));
            continue;
        }
        const auto rep = simulate(sc);
        if (mode == SimMode::failure_exit) {
            row.emplace_back(static_cast<long long>(cfg.sim.failure_state));
            row.emplace_back(static_cast<long long>(rep.attempts));
            row.emplace_back(rep.exit_time.mean);
            row.emplace_back(rep.exit_time.std_error);
            for (const auto& [l, e] : rep.origin_freq) {
                origins.add({static_cast<long long>(i), static_cast<long long>(l), e.mean, e.std_error});
            }
            table.add(std::move(row));
            continue;
        }
        row.emplace_back(rep.failure_freq.mean);
        row.emplace_back(rep.failure_freq.std_error);
        row.emplace_back(rep.delay_samples.mean);
        row.emplace_back(rep.delay_samples.std_error);
        if (mode == SimMode::propagation) {
            row.emplace_back(rep.delay_samples.q05);
            row.emplace_back(rep.delay_samples.median);
            row.emplace_back(rep.delay_samples.q95);
        } else {
            row.emplace_back(rep.fork_counts.mean);
            row.emplace_back(rep.fork_counts.std_error);
            row.emplace_back(rep.fork_freq.mean);
            row.emplace_back(rep.fork_freq.std_error);
        }
        table.add(std::move(row));

        Table curve;
        curve.columns = {"informed", "time_mean_s", "time_se_s"};
        for (std::size_t j = 0; j < rep.informed_curve_mean.size(); ++j) {
            curve.add({static_cast<long long>(j + 1), rep.informed_curve_mean[j].mean,
                       rep.informed_curve_mean[j].std_error});
        }
        auto h = header;
        h.extra.emplace_back("point", std::to_string(i));
        result.files.push_back(write_table(opts.out / "curves", point_stem(i), cfg.format, h, curve));
    }
    result.files.insert(result.files.begin(), write_table(opts.out, "simulate", cfg.format, header, table));
    if (mode == SimMode::failure_exit) result.files.push_back(write_table(opts.out, "origins", cfg.format, header, origins));
    result.summary = "simulated " + std::to_string(points.size()) + " grid point(s), mode " +
                     std::string(to_string(mode)) + ", seed " + std::to_string(cfg.sim.seed);
    return result;
}

CommandResult cmd_sweep(const RunConfig& raw, const Options& opts) {
    const auto cfg = with_options(raw, opts);
    if (cfg.recipe.empty()) throw ConfigError("sweep needs a recipe (--recipe or \"recipe\" in the config)");
    auto tables = run_recipe(cfg.recipe, cfg);
    auto header = make_header("sweep", cfg);
    header.extra = {{"recipe", cfg.recipe}};
    CommandResult result;
    for (const auto& t : tables) result.files.push_back(write_table(opts.out, t.stem, cfg.format, header, t.table));
    result.summary = "recipe " + cfg.recipe + ": " + std::to_string(tables.size()) + " table(s)";
    return result;
}

CommandResult cmd_validate(const RunConfig& raw, const Options& opts) {
    const auto cfg = with_options(raw, opts);
    const auto settings = validate_settings(cfg);
    const auto checks = run_validation(settings);
    auto header = make_header("validate", cfg);
    header.seed = settings.seed;
    header.extra = {{"rng", std::string(Philox4x32::kName)},
                    {"replications", std::to_string(settings.replications)},
                    {"race_replications", std::to_string(settings.race_replications)}};
    const auto table = checks_table(checks);

    CommandResult result;
    result.files.push_back(write_table(opts.out, "validate", cfg.format, header, table));
    long failed = 0;
    std::ostringstream s;
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) s << (i ? "  " : "") << format_cell(row[i]);
        s << "\n";
    }
    for (const auto& c : checks) failed += c.pass ? 0 : 1;
    s << (failed == 0 ? "all checks passed" : std::to_string(failed) + " check(s) failed");
    result.summary = s.str();
    result.exit_code = failed == 0 ? 0 : 1;
    return result;
}

}  // namespace blockprop::report

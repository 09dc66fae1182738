#include <cmath>
#include <functional>
#include <map>

#include "commands.hpp"
#include "evaluate.hpp"

namespace blockprop::report {

namespace {

constexpr int kTradeoffServers = 30;
constexpr int kTradeoffFanout = 8;
constexpr double kDefaultRate = 10.0;
constexpr double kDefaultBlockMb = 1.0;
constexpr double kDefaultBlockS = 600.0;

using Recipe = std::function<std::vector<NamedTable>(const RunConfig&, ModelCache&)>;

Cell integer(int v) { return static_cast<long long>(v); }

NetworkParams net_of(double rate, double block_mb, double block_s) {
    return NetworkParams::from_megabytes(rate, block_mb, block_s);
}

SecurityParams sec_of(const RunConfig& cfg, int confirmations, double share) {
    SecurityParams s;
    s.tx_size_bytes = cfg.tx_size_bytes;
    s.header_size_bytes = cfg.header_size_bytes;
    s.wait_time_s = cfg.wait_time_s;
    s.confirmations = confirmations;
    s.adversary_share = share;
    return s;
}

// 10^lo .. 10^hi with `per_decade` points per decade, endpoints included.
std::vector<double> log_grid(int lo, int hi, int per_decade) {
    std::vector<double> out;
    for (int i = 0; i <= (hi - lo) * per_decade; ++i) {
        out.push_back(std::pow(10.0, lo + static_cast<double>(i) / per_decade));
    }
    return out;
}

std::vector<double> block_time_grid_s() {
    auto g = log_grid(-3, 1, 4);
    for (auto& v : g) v *= 60.0;
    return g;
}

std::vector<NamedTable> fig4a(const RunConfig& cfg, ModelCache& cache) {
    Table t;
    t.columns = {"k", "informed", "time_s"};
    const auto net = net_of(kDefaultRate, kDefaultBlockMb, kDefaultBlockS);
    const std::vector<int> fanouts{2, 4, 8, 16};
    std::vector<ChainParams> chains;
    for (int k : fanouts) chains.push_back({30, k});
    cache.warm(chains, cfg.sim.threads);
    for (int k : fanouts) {
        for (const auto& c : cache.get({30, k})->profile(net).curve) t.add({integer(k), integer(c.informed), c.time_s});
    }
    return {{"fig4a", t}};
}

std::vector<NamedTable> fig4b(const RunConfig& cfg, ModelCache& cache) {
    Table t;
    t.columns = {"n", "data_rate_mbps", "informed", "time_s"};
    const std::vector<std::pair<int, double>> series{{10, 10.0}, {20, 10.0}, {30, 10.0}, {30, 20.0}};
    std::vector<ChainParams> chains;
    for (const auto& [n, rate] : series) chains.push_back({n, 4});
    cache.warm(chains, cfg.sim.threads);
    for (const auto& [n, rate] : series) {
        const auto net = net_of(rate, kDefaultBlockMb, kDefaultBlockS);
        for (const auto& c : cache.get({n, 4})->profile(net).curve) {
            t.add({integer(n), rate, integer(c.informed), c.time_s});
        }
    }
    return {{"fig4b", t}};
}

std::vector<NamedTable> fig4c(const RunConfig& cfg, ModelCache& cache) {
    Table t;
    t.columns = {"k", "n", "t_p"};
    const auto net = net_of(kDefaultRate, kDefaultBlockMb, kDefaultBlockS);
    std::vector<ChainParams> chains;
    for (int k : {2, 4, 6, 8}) {
        for (int n = 10; n <= 50; ++n) chains.push_back({n, k});
    }
    cache.warm(chains, cfg.sim.threads);
    for (const auto& c : chains) {
        t.add({integer(c.fanout), integer(c.servers), cache.get(c)->profile(net).total_delay});
    }
    return {{"fig4c", t}};
}

std::vector<ChainParams> all_fanouts(std::initializer_list<int> servers) {
    std::vector<ChainParams> chains;
    for (int n : servers) {
        for (int k = 1; k <= n - 1; ++k) chains.push_back({n, k});
    }
    return chains;
}

std::vector<NamedTable> fig4d(const RunConfig& cfg, ModelCache& cache) {
    Table t;
    t.columns = {"n", "k", "t_p"};
    const auto net = net_of(kDefaultRate, kDefaultBlockMb, kDefaultBlockS);
    const auto chains = all_fanouts({10, 20, 30});
    cache.warm(chains, cfg.sim.threads);
    for (const auto& c : chains) {
        t.add({integer(c.servers), integer(c.fanout), cache.get(c)->profile(net).total_delay});
    }
    return {{"fig4d", t}};
}

std::vector<NamedTable> fig4e(const RunConfig& cfg, ModelCache& cache) {
    Table t;
    t.columns = {"k", "n", "p_f"};
    std::vector<ChainParams> chains;
    for (int k : {1, 2, 4, 8}) {
        for (int n = 10; n <= 50; ++n) chains.push_back({n, k});
    }
    cache.warm(chains, cfg.sim.threads);
    for (const auto& c : chains) t.add({integer(c.fanout), integer(c.servers), cache.get(c)->failure_probability()});
    return {{"fig4e", t}};
}

std::vector<NamedTable> fig4f(const RunConfig& cfg, ModelCache& cache) {
    Table t;
    t.columns = {"n", "k", "p_f"};
    const auto chains = all_fanouts({10, 20, 30});
    cache.warm(chains, cfg.sim.threads);
    for (const auto& c : chains) t.add({integer(c.servers), integer(c.fanout), cache.get(c)->failure_probability()});
    return {{"fig4f", t}};
}

std::vector<NamedTable> fig4g(const RunConfig& cfg, ModelCache& cache) {
    Table t;
    t.columns = {"delta_s", "n", "k_min"};
    const auto net = net_of(kDefaultRate, kDefaultBlockMb, kDefaultBlockS);
    std::vector<ChainParams> chains;
    for (int n = 2; n <= 50; ++n) {
        for (int k = 1; k <= n - 1; ++k) chains.push_back({n, k});
    }
    cache.warm(chains, cfg.sim.threads);
    for (double delta : {0.01, 0.1, 1.0}) {
        for (int n = 2; n <= 50; ++n) {
            const double full = cache.get({n, n - 1})->profile(net).total_delay;
            int k = 1;
            while (k < n - 1 && cache.get({n, k})->profile(net).total_delay - full > delta) ++k;
            t.add({delta, integer(n), integer(k)});
        }
    }
    return {{"fig4g", t}};
}

std::vector<NamedTable> fig4h(const RunConfig& cfg, ModelCache& cache) {
    Table t;
    t.columns = {"n", "harmonic_s", "logarithmic_s", "t_p_full_fanout"};
    const auto net = net_of(kDefaultRate, kDefaultBlockMb, kDefaultBlockS);
    std::vector<ChainParams> chains;
    for (int n = 10; n <= 50; ++n) chains.push_back({n, n - 1});
    cache.warm(chains, cfg.sim.threads);
    for (const auto& c : chains) {
        const auto b = delay_lower_bound(net, c.servers);
        t.add({integer(c.servers), b.harmonic, b.logarithmic, cache.get(c)->profile(net).total_delay});
    }
    return {{"fig4h", t}};
}

struct SweepPoint {
    std::string axis;  // "block_time" or "block_size"
    double x = 0.0;
    NetworkParams net;
};

std::vector<SweepPoint> tradeoff_axis(const std::string& axis, double rate) {
    std::vector<SweepPoint> out;
    if (axis == "block_time") {
        for (double tb : block_time_grid_s()) out.push_back({axis, tb / 60.0, net_of(rate, kDefaultBlockMb, tb)});
    } else {
        for (double sb : log_grid(0, 4, 4)) out.push_back({axis, sb, net_of(rate, sb, kDefaultBlockS)});
    }
    return out;
}

std::string x_column(const std::string& axis) { return axis == "block_time" ? "block_time_min" : "block_size_mb"; }

// One family of metrics against t_b (fig5a, c, e) or s_b (fig5b, d, f).
std::vector<NamedTable> fig5(const RunConfig& cfg, ModelCache& cache, const std::string& stem, const std::string& axis,
                             char metric) {
    const auto model = cache.get({kTradeoffServers, kTradeoffFanout});
    Table t;
    t.columns = {"data_rate_mbps", x_column(axis)};
    switch (metric) {
        case 'k': t.columns.insert(t.columns.end(), {"p_k", "n_k"}); break;
        case 't': t.columns.insert(t.columns.end(), {"theta", "theta_bound"}); break;
        default: t.columns.insert(t.columns.end(), {"t_c", "t_c_bound"}); break;
    }
    for (double rate : {10.0, 20.0}) {
        for (const auto& pt : tradeoff_axis(axis, rate)) {
            const auto profile = model->profile(pt.net);
            const auto r = evaluate_tradeoff(profile, sec_of(cfg, 6, 0.1));
            std::vector<Cell> row{rate, pt.x};
            switch (metric) {
                case 'k': row.insert(row.end(), {r.forks.fork_prob, r.forks.expected_forks}); break;
                case 't': row.insert(row.end(), {r.throughput, r.throughput_bound}); break;
                default: row.insert(row.end(), {r.confirm_delay, r.confirm_delay_bound}); break;
            }
            t.add(std::move(row));
        }
    }
    std::vector<NamedTable> out{{stem, t}};
    if (metric != 'c') return out;

    // Security levels: m keeping p_m at the fork-free m = 6 value for shares
    // 0.1 (level 1) and 0.2 (level 2).
    Table levels;
    levels.columns = {"security_level", "adversary_share", x_column(axis), "confirmations", "t_c"};
    for (int level : {1, 2}) {
        const double share = 0.1 * level;
        const double target = modification_probability(1.0 - share, share, 6);
        for (const auto& pt : tradeoff_axis(axis, kDefaultRate)) {
            const auto profile = model->profile(pt.net);
            const auto fm = fork_metrics(profile, pt.net, kTradeoffServers);
            const auto sec = sec_of(cfg, 6, share);
            const auto rates = attack_rates(sec, pt.net, fm);
            if (rates.p <= rates.q) continue;
            int m = 0;
            try {
                m = required_confirmations(rates.p, rates.q, target);
            } catch (const ConvergenceError&) {
                continue;
            }
            auto sec_m = sec;
            sec_m.confirmations = m;
            levels.add({integer(level), share, pt.x, integer(m), confirmation_delay(sec_m, pt.net, fm).delay_s});
        }
    }
    out.push_back({stem + "_security_levels", levels});
    return out;
}

// FT (per λ_d) or p_m (per adversary share) against t_b or s_b.
std::vector<NamedTable> fig6_axis(const RunConfig& cfg, ModelCache& cache, const std::string& stem,
                                  const std::string& axis, bool tolerance) {
    const auto model = cache.get({kTradeoffServers, kTradeoffFanout});
    Table t;
    if (tolerance) {
        t.columns = {"data_rate_mbps", x_column(axis), "FT"};
        for (double rate : {10.0, 20.0}) {
            for (const auto& pt : tradeoff_axis(axis, rate)) {
                const auto fm = fork_metrics(model->profile(pt.net), pt.net, kTradeoffServers);
                t.add({rate, pt.x, fault_tolerance(fm)});
            }
        }
    } else {
        t.columns = {"adversary_share", x_column(axis), "p_m", "p_w"};
        for (double share : {0.1, 0.2}) {
            for (const auto& pt : tradeoff_axis(axis, kDefaultRate)) {
                const auto r = evaluate_tradeoff(model->profile(pt.net), sec_of(cfg, 6, share));
                t.add({share, pt.x, r.p_modify, r.p_modify_unencrypted});
            }
        }
    }
    return {{stem, t}};
}

std::vector<NamedTable> fig6e(const RunConfig& cfg, ModelCache& cache) {
    const auto model = cache.get({kTradeoffServers, kTradeoffFanout});
    Table t;
    t.columns = {"series", "block_time_s", "adversary_share", "p_m"};
    std::vector<double> shares;
    for (int i = 0; i <= 50; ++i) shares.push_back(i / 100.0);
    for (double share : shares) {
        const double pm = modification_probability(1.0 - share, share, 6);
        t.add({std::string("baseline"), kDefaultBlockS, share, pm});
    }
    for (double tb : {600.0, 6.0, 0.6}) {
        const auto net = net_of(kDefaultRate, kDefaultBlockMb, tb);
        const auto fm = fork_metrics(model->profile(net), net, kTradeoffServers);
        for (double share : shares) {
            const auto rates = attack_rates(sec_of(cfg, 6, share), net, fm);
            t.add({std::string("forking"), tb, share, modification_probability(rates.p, rates.q, 6)});
        }
    }
    return {{"fig6e", t}};
}

std::vector<NamedTable> fig6f(const RunConfig& cfg, ModelCache& cache) {
    const auto model = cache.get({kTradeoffServers, kTradeoffFanout});
    const double tb = 0.6;
    const auto net = net_of(kDefaultRate, kDefaultBlockMb, tb);
    const auto fm = fork_metrics(model->profile(net), net, kTradeoffServers);
    Table t;
    t.columns = {"series", "adversary_share", "confirmations", "p_m"};
    for (const char* series : {"baseline", "forking"}) {
        const bool forking = std::string(series) == "forking";
        for (double share : {0.1, 0.2}) {
            auto rates = AttackRates{1.0 - share, share};
            if (forking) rates = attack_rates(sec_of(cfg, 6, share), net, fm);
            for (int m = 0; m <= 50; ++m) {
                t.add({std::string(series), share, integer(m), modification_probability(rates.p, rates.q, m)});
            }
        }
    }
    return {{"fig6f", t}};
}

std::vector<NamedTable> custom(const RunConfig& cfg, ModelCache& cache) {
    const auto points = cfg.points();
    std::vector<ChainParams> chains;
    for (const auto& p : points) chains.push_back(p.chain);
    cache.warm(chains, cfg.sim.threads);
    std::vector<PointMetrics> metrics(points.size());
    parallel_indices(points.size(), cfg.sim.threads, [&](std::size_t i) {
        metrics[i] = evaluate_point(*cache.get(points[i].chain), points[i]);
    });
    Table t;
    t.columns = {"n", "k", "data_rate_mbps", "block_size_mb", "block_time_s", "confirmations", "adversary_share",
                 "t_p", "p_f", "p_k", "n_k", "theta", "theta_bound", "t_c", "t_c_bound", "FT", "p_m", "p_w"};
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& p = points[i];
        const auto& m = metrics[i];
        const auto& r = m.tradeoff;
        t.add({integer(p.chain.servers), integer(p.chain.fanout), p.net.data_rate_mbps, p.block_size_mb,
               p.net.block_time_s, integer(p.sec.confirmations), p.sec.adversary_share, m.profile.total_delay,
               m.profile.failure_prob, r.forks.fork_prob, r.forks.expected_forks, r.throughput, r.throughput_bound,
               r.confirm_delay, r.confirm_delay_bound, r.fault_tolerance, r.p_modify, r.p_modify_unencrypted});
    }
    return {{"custom", t}};
}

const std::map<std::string, Recipe>& recipes() {
    static const std::map<std::string, Recipe> table = [] {
        std::map<std::string, Recipe> r{
            {"fig4a", fig4a}, {"fig4b", fig4b}, {"fig4c", fig4c}, {"fig4d", fig4d}, {"fig4e", fig4e},
            {"fig4f", fig4f}, {"fig4g", fig4g}, {"fig4h", fig4h}, {"fig6e", fig6e}, {"fig6f", fig6f},
            {"custom", custom},
        };
        const std::pair<const char*, char> fig5_metrics[] = {{"a", 'k'}, {"c", 't'}, {"e", 'c'}};
        for (const auto& [letter, metric] : fig5_metrics) {
            const char m = metric;
            const std::string time_stem = std::string("fig5") + letter;
            const std::string size_stem = std::string("fig5") + static_cast<char>(letter[0] + 1);
            r[time_stem] = [=](const RunConfig& c, ModelCache& mc) { return fig5(c, mc, time_stem, "block_time", m); };
            r[size_stem] = [=](const RunConfig& c, ModelCache& mc) { return fig5(c, mc, size_stem, "block_size", m); };
        }
        const std::pair<const char*, bool> fig6_metrics[] = {{"a", true}, {"c", false}};
        for (const auto& [letter, tol] : fig6_metrics) {
            const bool t = tol;
            const std::string time_stem = std::string("fig6") + letter;
            const std::string size_stem = std::string("fig6") + static_cast<char>(letter[0] + 1);
            r[time_stem] = [=](const RunConfig& c, ModelCache& mc) { return fig6_axis(c, mc, time_stem, "block_time", t); };
            r[size_stem] = [=](const RunConfig& c, ModelCache& mc) { return fig6_axis(c, mc, size_stem, "block_size", t); };
        }
        return r;
    }();
    return table;
}

}  // namespace

std::vector<std::string> recipe_names() {
    std::vector<std::string> out;
    for (const auto& [name, _] : recipes()) out.push_back(name);
    return out;
}

std::vector<NamedTable> run_recipe(const std::string& name, const RunConfig& cfg) {
    const auto it = recipes().find(name);
    if (it == recipes().end()) {
        std::string list;
        for (const auto& n : recipe_names()) list += (list.empty() ? "" : ", ") + n;
        throw ConfigError("unknown recipe '" + name + "'; valid recipes: " + list);
    }
    ModelCache cache;
    return it->second(cfg, cache);
}

}  // namespace blockprop::report

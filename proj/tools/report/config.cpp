#include "config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace blockprop::report {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
    throw ConfigError(field + ": " + what);
}

void reject_unknown(const json& obj, const std::string& where, const std::set<std::string>& known) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!known.count(it.key())) fail(where + it.key(), "unknown field");
    }
}

const json& object_at(const json& parent, const std::string& key, const std::string& where) {
    const auto& v = parent.at(key);
    if (!v.is_object()) fail(where + key, "expected an object");
    return v;
}

double number(const json& v, const std::string& field) {
    if (!v.is_number()) fail(field, "expected a number");
    return v.get<double>();
}

long integer(const json& v, const std::string& field) {
    if (!v.is_number_integer()) fail(field, "expected an integer");
    return v.get<long>();
}

// Accepts a scalar or a non-empty list.
template <typename T, typename Read>
std::vector<T> list(const json& v, const std::string& field, Read read) {
    std::vector<T> out;
    if (!v.is_array()) {
        out.push_back(read(v, field));
        return out;
    }
    if (v.empty()) fail(field, "list must not be empty");
    for (std::size_t i = 0; i < v.size(); ++i) {
        out.push_back(read(v[i], field + "[" + std::to_string(i) + "]"));
    }
    return out;
}

std::vector<double> positive_list(const json& v, const std::string& field) {
    auto out = list<double>(v, field, number);
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (!(out[i] > 0.0)) fail(field + "[" + std::to_string(i) + "]", "must be positive");
    }
    return out;
}

std::vector<int> int_list(const json& v, const std::string& field, int lo) {
    auto raw = list<long>(v, field, integer);
    std::vector<int> out;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw[i] < lo || raw[i] > 100000) {
            fail(field + "[" + std::to_string(i) + "]", "must lie in [" + std::to_string(lo) + ", 100000]");
        }
        out.push_back(static_cast<int>(raw[i]));
    }
    return out;
}

void read_grid(const json& g, Grid& grid) {
    const std::string at = "grid.";
    reject_unknown(g, at, {"servers", "fanout", "data_rate_mbps", "block_size_mb", "block_time_s",
                           "confirmations", "adversary_share"});
    if (g.contains("servers")) grid.servers = int_list(g["servers"], at + "servers", 2);
    if (g.contains("fanout")) {
        if (g["fanout"] == "all") {
            grid.fanout.clear();
        } else {
            grid.fanout = int_list(g["fanout"], at + "fanout", 1);
        }
    }
    if (g.contains("data_rate_mbps")) grid.data_rate_mbps = positive_list(g["data_rate_mbps"], at + "data_rate_mbps");
    if (g.contains("block_size_mb")) grid.block_size_mb = positive_list(g["block_size_mb"], at + "block_size_mb");
    if (g.contains("block_time_s")) grid.block_time_s = positive_list(g["block_time_s"], at + "block_time_s");
    if (g.contains("confirmations")) grid.confirmations = int_list(g["confirmations"], at + "confirmations", 0);
    if (g.contains("adversary_share")) {
        grid.adversary_share = list<double>(g["adversary_share"], at + "adversary_share", number);
        for (std::size_t i = 0; i < grid.adversary_share.size(); ++i) {
            const double s = grid.adversary_share[i];
            if (!(s >= 0.0 && s < 1.0)) {
                fail(at + "adversary_share[" + std::to_string(i) + "]", "must lie in [0, 1)");
            }
        }
    }
    for (std::size_t i = 0; i < grid.servers.size(); ++i) {
        for (std::size_t j = 0; j < grid.fanout.size(); ++j) {
            if (grid.fanout[j] > grid.servers[i] - 1) {
                fail(at + "fanout[" + std::to_string(j) + "]",
                     "k=" + std::to_string(grid.fanout[j]) + " exceeds n-1 for servers[" + std::to_string(i) +
                         "]=" + std::to_string(grid.servers[i]));
            }
        }
    }
}

void read_simulation(const json& s, SimulationSettings& sim) {
    const std::string at = "simulation.";
    reject_unknown(s, at, {"replications", "seed", "mode", "failure_state", "exit_sampling", "race_step_cap",
                           "threads"});
    if (s.contains("replications")) {
        sim.replications = integer(s["replications"], at + "replications");
        if (sim.replications < 1) fail(at + "replications", "must be >= 1");
    }
    if (s.contains("seed")) {
        if (!s["seed"].is_number_unsigned()) fail(at + "seed", "expected a non-negative integer");
        sim.seed = s["seed"].get<std::uint64_t>();
    }
    if (s.contains("mode")) {
        if (!s["mode"].is_string()) fail(at + "mode", "expected a string");
        try {
            sim.mode = sim_mode_from_string(s["mode"].get<std::string>());
        } catch (const ParameterError& e) {
            fail(at + "mode", e.what());
        }
    }
    if (s.contains("failure_state")) sim.failure_state = static_cast<int>(integer(s["failure_state"], at + "failure_state"));
    if (s.contains("exit_sampling")) {
        const auto& v = s["exit_sampling"];
        if (v == "exact") {
            sim.exit_sampling = ExitSampling::exact;
        } else if (v == "through") {
            sim.exit_sampling = ExitSampling::through;
        } else {
            fail(at + "exit_sampling", "expected \"exact\" or \"through\"");
        }
    }
    if (s.contains("race_step_cap")) {
        sim.race_step_cap = integer(s["race_step_cap"], at + "race_step_cap");
        if (sim.race_step_cap < 1) fail(at + "race_step_cap", "must be >= 1");
    }
    if (s.contains("threads")) {
        sim.threads = static_cast<int>(integer(s["threads"], at + "threads"));
        if (sim.threads < 0) fail(at + "threads", "must be >= 0");
    }
}

}  // namespace

std::vector<GridPoint> RunConfig::points() const {
    std::vector<GridPoint> out;
    for (int n : grid.servers) {
        std::vector<int> ks = grid.fanout;
        if (ks.empty()) {
            for (int k = 1; k <= n - 1; ++k) ks.push_back(k);
        }
        for (int k : ks) {
            for (double rate : grid.data_rate_mbps) {
                for (double mb : grid.block_size_mb) {
                    for (double tb : grid.block_time_s) {
                        for (int m : grid.confirmations) {
                            for (double share : grid.adversary_share) {
                                GridPoint p;
                                p.chain = {n, k};
                                p.net = NetworkParams::from_megabytes(rate, mb, tb);
                                p.sec = {tx_size_bytes, header_size_bytes, wait_time_s, m, share};
                                p.block_size_mb = mb;
                                out.push_back(p);
                            }
                        }
                    }
                }
            }
        }
    }
    return out;
}

RunConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config: top level must be an object");
    reject_unknown(doc, "", {"grid", "security", "simulation", "output", "recipe"});

    RunConfig cfg;
    cfg.source = doc;
    if (doc.contains("grid")) read_grid(object_at(doc, "grid", ""), cfg.grid);
    if (doc.contains("security")) {
        const auto& s = object_at(doc, "security", "");
        reject_unknown(s, "security.", {"tx_size_bytes", "header_size_bytes", "wait_time_s"});
        if (s.contains("tx_size_bytes")) cfg.tx_size_bytes = number(s["tx_size_bytes"], "security.tx_size_bytes");
        if (s.contains("header_size_bytes")) cfg.header_size_bytes = number(s["header_size_bytes"], "security.header_size_bytes");
        if (s.contains("wait_time_s")) cfg.wait_time_s = number(s["wait_time_s"], "security.wait_time_s");
        try {
            SecurityParams{cfg.tx_size_bytes, cfg.header_size_bytes, cfg.wait_time_s, 0, 0.0}.validate();
        } catch (const ParameterError& e) {
            fail("security", e.what());
        }
    }
    if (doc.contains("simulation")) read_simulation(object_at(doc, "simulation", ""), cfg.sim);
    if (doc.contains("output")) {
        const auto& o = object_at(doc, "output", "");
        reject_unknown(o, "output.", {"format"});
        if (o.contains("format")) {
            if (o["format"] != "csv" && o["format"] != "json") fail("output.format", "expected \"csv\" or \"json\"");
            cfg.format = o["format"].get<std::string>();
        }
    }
    if (doc.contains("recipe")) {
        if (!doc["recipe"].is_string()) fail("recipe", "expected a string");
        cfg.recipe = doc["recipe"].get<std::string>();
    }
    for (double mb : cfg.grid.block_size_mb) {
        if (mb * 1e6 <= cfg.header_size_bytes) fail("grid.block_size_mb", "block must be larger than its header");
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path + ": cannot open config file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string config_hash(const RunConfig& cfg) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : cfg.source.dump()) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[h & 0xf];
        h >>= 4;
    }
    return out;
}

}  // namespace blockprop::report

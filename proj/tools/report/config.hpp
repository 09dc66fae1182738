#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "blockprop/gossip_sim.hpp"
#include "blockprop/params.hpp"

namespace blockprop::report {

/// Bad configuration: message names the offending field or input line.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Grid {
    std::vector<int> servers{30};
    /// Empty means every k in [1, n-1].
    std::vector<int> fanout{8};
    std::vector<double> data_rate_mbps{10.0};
    std::vector<double> block_size_mb{1.0};
    std::vector<double> block_time_s{600.0};
    std::vector<int> confirmations{6};
    std::vector<double> adversary_share{0.1};
};

struct GridPoint {
    ChainParams chain;
    NetworkParams net;
    SecurityParams sec;
    double block_size_mb = 1.0;
};

struct SimulationSettings {
    long replications = 10'000;
    std::uint64_t seed = 1;
    SimMode mode = SimMode::propagation;
    int failure_state = 0;
    ExitSampling exit_sampling = ExitSampling::exact;
    long race_step_cap = 10'000'000;
    int threads = 0;
};

struct RunConfig {
    Grid grid;
    double tx_size_bytes = 250.0;
    double header_size_bytes = 80.0;
    double wait_time_s = 600.0;
    SimulationSettings sim;
    std::string format = "csv";
    std::string recipe;
    /// Canonical form of the input, used for the config hash.
    nlohmann::json source = nlohmann::json::object();

    /// Grid in row-major order: n, k, λ_d, s_b, t_b, m, share.
    std::vector<GridPoint> points() const;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// FNV-1a 64 of the canonical JSON, as 16 hex digits.
std::string config_hash(const RunConfig& cfg);

}  // namespace blockprop::report

#include "blockprop/params.hpp"

#include <cmath>

namespace blockprop {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw ParameterError(what);
}

bool positive(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

void ChainParams::validate() const {
    require(servers >= 2, "servers must be >= 2 (got " + std::to_string(servers) + ")");
    require(fanout >= 1 && fanout <= servers - 1,
            "fanout must lie in [1, servers-1] (got " + std::to_string(fanout) + " for " +
                std::to_string(servers) + " servers)");
}

NetworkParams NetworkParams::from_megabytes(double data_rate_mbps, double block_size_mb,
                                            double block_time_s) {
    NetworkParams net;
    net.data_rate_mbps = data_rate_mbps;
    net.block_size_mbit = block_size_mb * kBitsPerMegabyte / kBitsPerMegabit;
    net.block_time_s = block_time_s;
    net.validate();
    return net;
}

void NetworkParams::validate() const {
    require(positive(data_rate_mbps), "data rate must be a positive finite number");
    require(positive(block_size_mbit), "block size must be a positive finite number");
    require(positive(block_time_s), "block time must be a positive finite number");
}

void SecurityParams::validate() const {
    require(positive(tx_size_bytes), "transaction size must be positive");
    require(std::isfinite(header_size_bytes) && header_size_bytes >= 0.0,
            "header size must be non-negative");
    require(std::isfinite(wait_time_s) && wait_time_s >= 0.0, "wait time must be non-negative");
    require(confirmations >= 0, "confirmations must be non-negative");
    require(std::isfinite(adversary_share) && adversary_share >= 0.0 && adversary_share < 1.0,
            "adversary share must lie in [0, 1)");
}

void SecurityParams::validate_against(const NetworkParams& net) const {
    validate();
    require(net.block_size_bytes() > header_size_bytes,
            "block payload (block size minus header) must be positive");
}

}  // namespace blockprop

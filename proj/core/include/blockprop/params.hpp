#pragma once

#include <stdexcept>
#include <string>

namespace blockprop {

/// Thrown when user-supplied parameters violate their documented ranges.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown when an iterative evaluation exhausts its budget.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shape of one consensus domain: `servers` edge servers, each gossiping a
/// new block to `fanout` randomly chosen peers.
struct ChainParams {
    int servers = 0;
    int fanout = 0;

    void validate() const;
    bool operator==(const ChainParams&) const = default;
};

/// Bits in one megabyte (10^6 bytes).
inline constexpr double kBitsPerMegabyte = 8.0e6;
inline constexpr double kBitsPerMegabit = 1.0e6;

/// Timing inputs. Block size is stored in megabits so that
/// `block_size_mbit / data_rate_mbps` is directly the expected single-link
/// transmission time in seconds.
struct NetworkParams {
    double data_rate_mbps = 10.0;
    double block_size_mbit = 8.0;
    double block_time_s = 600.0;

    static NetworkParams from_megabytes(double data_rate_mbps, double block_size_mb,
                                        double block_time_s);

    double block_size_mb() const { return block_size_mbit * kBitsPerMegabit / kBitsPerMegabyte; }
    double block_size_bytes() const { return block_size_mbit * kBitsPerMegabit / 8.0; }
    /// E[T_m], seconds.
    double link_time() const { return block_size_mbit / data_rate_mbps; }
    /// Blocks per second across the whole domain.
    double block_rate() const { return 1.0 / block_time_s; }

    void validate() const;
};

/// Inputs to the capability and security metrics.
struct SecurityParams {
    double tx_size_bytes = 250.0;
    double header_size_bytes = 80.0;
    double wait_time_s = 600.0;
    int confirmations = 6;
    /// Adversary share of the total block generation rate, in [0, 1).
    double adversary_share = 0.1;

    void validate() const;
    void validate_against(const NetworkParams& net) const;
};

}  // namespace blockprop

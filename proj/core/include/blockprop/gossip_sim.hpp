#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "blockprop/params.hpp"

namespace blockprop {

enum class SimMode { propagation, forking, failure_exit, race };

std::string_view to_string(SimMode mode);
SimMode sim_mode_from_string(std::string_view name);

/// How failure_exit replications are conditioned.
///  - exact: start from a stall with exactly I informed servers.
///  - through: run whole propagations and keep those already in failure
///    mode when the I-th server is informed; measures the I -> I+1 time and
///    the informed count at which the crossing rescue block was generated.
enum class ExitSampling { exact, through };

struct SimConfig {
    ChainParams chain;
    NetworkParams net;
    long replications = 10'000;
    std::uint64_t seed = 1;
    SimMode mode = SimMode::propagation;
    /// Worker threads; 0 uses the hardware concurrency. Never affects results.
    int threads = 0;

    int failure_state = 0;
    ExitSampling exit_sampling = ExitSampling::exact;
    /// Give up on `through` sampling after this many whole propagations.
    long max_attempts = 200'000'000;

    void validate() const;
};

struct RaceConfig {
    double p = 0.5;
    double q = 0.5;
    int confirmations = 6;
    long replications = 100'000;
    std::uint64_t seed = 1;
    long step_cap = 10'000'000;
    /// A walk is scored as lost once (q/p)^deficit drops below this.
    double abandon_below = 1e-15;
    int threads = 0;

    void validate() const;
};

struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;
};

struct SampleSummary {
    long count = 0;
    double mean = 0.0;
    double std_error = 0.0;
    double min = 0.0;
    double q05 = 0.0;
    double median = 0.0;
    double q95 = 0.0;
    double max = 0.0;
};

struct SimReport {
    SimMode mode = SimMode::propagation;
    std::string rng = "";
    std::uint64_t seed = 0;
    long replications = 0;

    /// Mean time at which i servers hold the block, i = 1..n at index i-1.
    std::vector<Estimate> informed_curve_mean;
    /// Mean duration of round r = 1..n-1 at index r-1.
    std::vector<Estimate> round_time_mean;
    SampleSummary delay_samples;
    Estimate failure_freq;

    Estimate fork_counts;
    Estimate fork_freq;

    Estimate race_win_freq;
    double race_cap_hit_freq = 0.0;

    Estimate exit_time;
    std::map<int, Estimate> origin_freq;
    long attempts = 0;
};

SimReport simulate_propagation(const SimConfig& cfg);
SimReport simulate_forking(const SimConfig& cfg);
SimReport simulate_failure_exit(const SimConfig& cfg, int informed);
SimReport simulate_race(const RaceConfig& cfg);
/// Gambler's-ruin walks from `deficit` blocks behind; a win is drawing level.
/// Uses p, q, replications, seed, step_cap, abandon_below and threads.
SimReport simulate_catch_up(const RaceConfig& cfg, int deficit);
/// Dispatches on cfg.mode (race is configured separately).
SimReport simulate(const SimConfig& cfg);

}  // namespace blockprop

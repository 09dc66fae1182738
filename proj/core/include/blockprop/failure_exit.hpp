#pragma once

#include <map>
#include <vector>

#include "blockprop/markov_core.hpp"
#include "blockprop/params.hpp"

namespace blockprop {

/// A time that is linear in the single-link time s_b/λ_d and in the block
/// generation time t_b. Lets one model serve every network setting.
struct TimeCoefficients {
    double link = 0.0;
    double block = 0.0;

    double seconds(const NetworkParams& net) const {
        return link * net.link_time() + block * net.block_time_s;
    }
};

/// Failure-state analysis for one (n, k). States {I, 0} exist for
/// I in [k+2, n-1]; construction rejects k >= n-2.
///
/// Distributions are indexed densely: transition_row(I)[i] is the move to
/// {I+i, 0}, conditioned_entry(I)[l-(k+2)] and last_block(I)[l-(k+2)] cover
/// l in [k+2, I], and round_of_transition(I, l)[r] covers r in [0, I+1].
class FailureModel {
public:
    explicit FailureModel(const ChainParams& params);

    const ChainParams& params() const { return table_.params(); }
    const TransitionTable& table() const { return table_; }
    const RoundDistributions& rounds() const { return rounds_; }
    int first_state() const { return params().fanout + 2; }
    int last_state() const { return params().servers - 1; }

    std::vector<double> transition_row(int informed) const;
    std::vector<double> conditioned_entry(int informed) const;
    std::vector<double> last_block(int informed) const;
    std::vector<double> round_of_transition(int informed, int origin) const;
    /// β(l, I): probability that the block generated in {l, 0} reaches more
    /// than I servers.
    double escape_probability(int origin, int informed) const;

    TimeCoefficients exit_time(int informed) const;

private:
    void check_state(int informed) const;
    void compute_conditioned_round_times();
    void compute_stall_durations();

    TransitionTable table_;
    RoundDistributions rounds_;
    std::vector<std::vector<double>> rows_;  // rows_[I][i]
    std::vector<double> round_time_;         // E[T_j] / (s_b/λ_d) given no stall before round j
    std::vector<double> stall_time_;         // p_{j,0} * E[duration | stall at j] / (s_b/λ_d)
    std::vector<std::vector<double>> pascal_;
};

struct FailureExitEntry {
    int informed = 0;
    double exit_time_s = 0.0;
    std::vector<double> row;  // P{I+i, 0 | I, 0}, i = 0..n-I
};

struct FailureExitTable {
    ChainParams chain;
    std::vector<FailureExitEntry> entries;  // I ascending from k+2
};

FailureExitTable build_failure_exit_table(const FailureModel& model, const NetworkParams& net);

std::map<int, double> failure_transition_row(const ChainParams& params, int informed);
std::map<int, double> conditioned_entry_probs(const ChainParams& params, int informed);
std::map<int, double> last_block_state_dist(const ChainParams& params, int informed);
std::map<int, double> round_of_transition_dist(const ChainParams& params, int informed, int origin);
double expected_failure_exit_time(const ChainParams& params, const NetworkParams& net, int informed);

}  // namespace blockprop

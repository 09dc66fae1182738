#pragma once

#include <array>
#include <map>
#include <set>
#include <span>
#include <string_view>
#include <vector>

#include "blockprop/params.hpp"

namespace blockprop {

/// One state {I_r, E_r} of the propagation chain. Round r has I_r = r.
struct PropState {
    int informed = 1;
    int engaged = 0;

    auto operator<=>(const PropState&) const = default;
};

enum class StateType { type_i, type_ii, type_iii, type_iv, deterministic };

std::string_view to_string(StateType type);

struct Transition {
    PropState to;
    double probability = 0.0;
};

/// Inclusive bounds of E_r at a given round.
struct EngagedRange {
    int lo = 0;
    int hi = 0;
};

EngagedRange engaged_range(const ChainParams& params, int round);

/// Validates `state` against the chain's support and returns its type.
StateType classify_state(const PropState& state, const ChainParams& params);

/// Successors of a state with at least one engaged server. Zero-probability
/// outcomes are omitted.
std::vector<Transition> one_step_transitions(const PropState& state, const ChainParams& params);

/// Reachable states of one propagation, grouped by round, with their one-step
/// rows. Failure states {I, 0} and the terminal {n, 0} carry empty rows: the
/// moves between failure states live in FailureModel.
class TransitionTable {
public:
    static TransitionTable build(const ChainParams& params);

    const ChainParams& params() const { return params_; }
    int servers() const { return params_.servers; }
    int fanout() const { return params_.fanout; }

    /// States of round r (1..n), ordered by engaged count.
    std::span<const PropState> round(int r) const;
    std::span<const Transition> successors(const PropState& state) const;
    bool contains(const PropState& state) const;
    std::size_t size() const { return rows_.size(); }
    std::vector<PropState> states() const;

    /// True when failure states exist at all (k <= n - 3).
    bool has_failure_states() const { return params_.fanout <= params_.servers - 3; }

private:
    explicit TransitionTable(const ChainParams& params);
    int index_of(const PropState& state) const;

    ChainParams params_;
    std::vector<std::vector<PropState>> rounds_;  // rounds_[r], r in 1..n
    std::vector<int> first_index_;                // flat index of rounds_[r][0]
    std::vector<int> lookup_;                     // (I, E) -> flat index or -1
    std::vector<std::vector<Transition>> rows_;
};

TransitionTable build_state_space(const ChainParams& params);

/// The closed-form state space of the regime `params` falls into, with the
/// per-type partition of its non-absorbing states.
struct CaseStateSpace {
    int regime = 0;
    std::set<PropState> states;
    /// Indexed by type I..IV. All empty in the deterministic regime.
    std::array<std::set<PropState>, 4> by_type;
};

int regime_of(const ChainParams& params);
CaseStateSpace case_state_space(const ChainParams& params);

/// Round marginals of the chain started at {1, k}.
///
/// Failure mass is carried forward: the E = 0 entry of round r is the
/// probability that the block is in failure mode when the r-th server gets
/// informed, whichever round the gossip stalled in. Each round therefore
/// sums to one.
class RoundDistributions {
public:
    explicit RoundDistributions(const TransitionTable& table);

    int servers() const { return static_cast<int>(mass_.size()) - 1; }
    /// Mass on {r, E} indexed by E = 0..n-r.
    std::span<const double> at(int round) const;
    /// p_{j,0}: the gossip stalls with exactly j informed servers. j = n is
    /// completion without any stall.
    double stall_mass(int informed) const;
    /// Sum of stall masses for j <= informed (j < n).
    double stalled_by(int informed) const;
    /// Mass still gossiping (E > 0) in round r; equals 1 - stalled_by(r)
    /// without the cancellation when failure is likely.
    double alive(int round) const;
    double failure_probability() const;

private:
    std::vector<std::vector<double>> mass_;
    std::vector<double> stall_;
};

/// Round-r distribution as a state map; r in [1, n].
std::map<PropState, double> multi_step_distribution(const ChainParams& params, int round);

}  // namespace blockprop

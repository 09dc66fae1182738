#pragma once

#include <memory>
#include <vector>

#include "blockprop/failure_exit.hpp"
#include "blockprop/markov_core.hpp"
#include "blockprop/params.hpp"

namespace blockprop {

inline constexpr double kEulerGamma = 0.57721566490;

struct CurvePoint {
    double time_s = 0.0;
    int informed = 0;
};

struct PropagationProfile {
    ChainParams chain;
    NetworkParams net;
    std::vector<double> round_times;  // t_r for r = 1..n-1 at index r-1
    std::vector<CurvePoint> curve;    // (Σ_{r<i} t_r, i) for i = 1..n
    double total_delay = 0.0;
    double failure_prob = 0.0;
};

/// Everything about one (n, k) that does not depend on the network. Round
/// times are stored as coefficients of s_b/λ_d and t_b, so one model
/// evaluates any number of network settings cheaply.
class PropagationModel {
public:
    explicit PropagationModel(const ChainParams& params);

    const ChainParams& params() const { return table_.params(); }
    const TransitionTable& table() const { return table_; }
    const RoundDistributions& rounds() const { return rounds_; }
    /// Null when k >= n - 2 (no failure states).
    const FailureModel* failure_model() const { return failure_.get(); }

    /// E[T_r] for r in [1, n-1].
    TimeCoefficients round_time(int round) const;
    double failure_probability() const { return rounds_.failure_probability(); }
    PropagationProfile profile(const NetworkParams& net) const;

private:
    TransitionTable table_;
    RoundDistributions rounds_;
    std::shared_ptr<const FailureModel> failure_;
    std::vector<TimeCoefficients> round_times_;
};

double expected_round_time(const ChainParams& params, const NetworkParams& net, int round);
std::vector<CurvePoint> informed_curve(const ChainParams& params, const NetworkParams& net);
double propagation_delay(const ChainParams& params, const NetworkParams& net);
PropagationProfile propagation_profile(const ChainParams& params, const NetworkParams& net);

struct DelayBound {
    double harmonic = 0.0;
    double logarithmic = 0.0;
};

DelayBound delay_lower_bound(const NetworkParams& net, int servers);

double failure_probability(const ChainParams& params);

/// Smallest k whose delay is within `delta` seconds of the full fan-out
/// delay t_p(n-1).
int min_fanout_for_accuracy(int servers, const NetworkParams& net, double delta);

}  // namespace blockprop

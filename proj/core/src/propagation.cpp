#include "blockprop/propagation.hpp"

#include <cmath>
#include <string>

namespace blockprop {

PropagationModel::PropagationModel(const ChainParams& params)
    : table_(TransitionTable::build(params)), rounds_(table_) {
    const int n = params.servers;
    const int k = params.fanout;
    if (table_.has_failure_states()) failure_ = std::make_shared<const FailureModel>(params);

    round_times_.assign(static_cast<std::size_t>(n), {});
    for (int r = 1; r <= n - 1; ++r) {
        auto& t = round_times_[static_cast<std::size_t>(r)];
        const auto mass = rounds_.at(r);
        for (std::size_t e = 1; e < mass.size(); ++e) t.link += mass[e] / static_cast<double>(e);
        // mass[0] is the chance the block sits in failure mode at this round,
        // whichever earlier round it stalled in.
        if (failure_ && r >= k + 2 && mass[0] > 0.0) {
            const auto exit = failure_->exit_time(r);
            t.link += mass[0] * exit.link;
            t.block += mass[0] * exit.block;
        }
    }
}

TimeCoefficients PropagationModel::round_time(int round) const {
    if (round < 1 || round > params().servers - 1) {
        throw ParameterError("round must lie in [1, n-1] (got " + std::to_string(round) + ")");
    }
    return round_times_[static_cast<std::size_t>(round)];
}

PropagationProfile PropagationModel::profile(const NetworkParams& net) const {
    net.validate();
    const int n = params().servers;
    PropagationProfile p;
    p.chain = params();
    p.net = net;
    p.curve.push_back({0.0, 1});
    double elapsed = 0.0;
    for (int r = 1; r <= n - 1; ++r) {
        const double t = round_times_[static_cast<std::size_t>(r)].seconds(net);
        p.round_times.push_back(t);
        elapsed += t;
        p.curve.push_back({elapsed, r + 1});
    }
    p.total_delay = elapsed;
    p.failure_prob = failure_probability();
    return p;
}

double expected_round_time(const ChainParams& params, const NetworkParams& net, int round) {
    net.validate();
    return PropagationModel(params).round_time(round).seconds(net);
}

std::vector<CurvePoint> informed_curve(const ChainParams& params, const NetworkParams& net) {
    return PropagationModel(params).profile(net).curve;
}

double propagation_delay(const ChainParams& params, const NetworkParams& net) {
    return PropagationModel(params).profile(net).total_delay;
}

PropagationProfile propagation_profile(const ChainParams& params, const NetworkParams& net) {
    return PropagationModel(params).profile(net);
}

DelayBound delay_lower_bound(const NetworkParams& net, int servers) {
    net.validate();
    if (servers < 2) throw ParameterError("servers must be >= 2");
    const double tau = net.link_time();
    double h = 0.0;
    for (int e = 1; e <= servers - 1; ++e) h += 1.0 / e;
    const double m = servers - 1;
    return {tau * h, tau * (std::log(m) + 1.0 / (2.0 * m) + kEulerGamma)};
}

double failure_probability(const ChainParams& params) {
    const auto table = TransitionTable::build(params);
    return RoundDistributions(table).failure_probability();
}

int min_fanout_for_accuracy(int servers, const NetworkParams& net, double delta) {
    net.validate();
    if (!(delta > 0.0)) throw ParameterError("delay accuracy delta must be positive");
    const double floor = propagation_delay({servers, servers - 1}, net);
    for (int k = 1; k < servers - 1; ++k) {
        if (propagation_delay({servers, k}, net) - floor <= delta) return k;
    }
    return servers - 1;
}

}  // namespace blockprop

#include "blockprop/fork_security.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace blockprop {

double fork_exposure(const PropagationProfile& profile) {
    const int n = profile.chain.servers;
    double s = 0.0;
    for (int r = 1; r <= n - 1; ++r) {
        s += static_cast<double>(n - r) / n * profile.round_times[static_cast<std::size_t>(r - 1)];
    }
    return s;
}

ForkMetrics fork_metrics(const PropagationProfile& profile, const NetworkParams& net, int servers) {
    net.validate();
    if (profile.chain.servers != servers) {
        throw ParameterError("profile was computed for a different server count");
    }
    const double nk = net.block_rate() * fork_exposure(profile);
    return {-std::expm1(-nk), nk};
}

double transactions_per_block(const NetworkParams& net, const SecurityParams& sec) {
    sec.validate_against(net);
    return std::floor((net.block_size_bytes() - sec.header_size_bytes) / sec.tx_size_bytes);
}

double throughput(const NetworkParams& net, const SecurityParams& sec, const ForkMetrics& fm) {
    return net.block_rate() * transactions_per_block(net, sec) / (1.0 + fm.expected_forks);
}

double throughput_upper_bound(const PropagationProfile& profile, const SecurityParams& sec, int servers) {
    if (profile.chain.servers != servers) {
        throw ParameterError("profile was computed for a different server count");
    }
    return transactions_per_block(profile.net, sec) / fork_exposure(profile);
}

ConfirmationDelay confirmation_delay(const SecurityParams& sec, const NetworkParams& net, const ForkMetrics& fm) {
    sec.validate();
    net.validate();
    const double m = sec.confirmations;
    // n_k / λ_b is the fork exposure window, so the bound needs no profile.
    return {sec.wait_time_s + m * (1.0 + fm.expected_forks) * net.block_time_s,
            sec.wait_time_s + m * fm.expected_forks * net.block_time_s};
}

AttackRates attack_rates(const SecurityParams& sec, const NetworkParams& net, const ForkMetrics& fm) {
    sec.validate();
    net.validate();
    const double honest = (1.0 - sec.adversary_share) * net.block_rate();
    const double malicious = (1.0 + fm.expected_forks) * sec.adversary_share * net.block_rate();
    const double total = honest + malicious;
    return {honest / total, malicious / total};
}

double catch_up_probability(double p, double q, int deficit) {
    if (deficit < 0) throw ParameterError("deficit must be non-negative");
    if (p <= q) return 1.0;
    return std::pow(q / p, deficit);
}

double win_after_inclusion(double p, double q, int confirmations, int n0) {
    if (p <= q) return 1.0;
    return 1.0 - std::pow(p, n0 - confirmations - 2) * (p * p * p - q * q * q);
}

double modification_probability(double p, double q, int confirmations, double tail_tol, long term_budget) {
    if (confirmations < 0) throw ParameterError("confirmations must be non-negative");
    if (!(tail_tol > 0.0)) throw ParameterError("tail tolerance must be positive");
    if (p <= q) return 1.0;
    const int m = confirmations;
    if (m == 0) return q / p;

    // Negative-binomial mass of n0 attacker blocks by the m-th honest one,
    // advanced by t(n0+1) = t(n0) (m+n0)/(n0+1) q.
    double term = std::exp(m * std::log(p));
    double seen = 0.0;
    double total = 0.0;
    for (long n0 = 0; n0 < term_budget; ++n0) {
        if (n0 <= m) {
            total += term * std::pow(q / p, static_cast<double>(m - n0 + 1));
        } else {
            total += term * win_after_inclusion(p, q, m, static_cast<int>(n0));
        }
        seen += term;
        if (seen >= 1.0 - tail_tol) return std::clamp(total, 0.0, 1.0);
        term *= static_cast<double>(m + n0) / static_cast<double>(n0 + 1) * q;
    }
    throw ConvergenceError("negative-binomial tail did not fall below " + std::to_string(tail_tol) +
                           " within " + std::to_string(term_budget) + " terms");
}

double modification_probability_unencrypted(double p, double q) {
    if (p <= q) return 1.0;
    return std::min(q / p, 1.0);
}

double fault_tolerance(const ForkMetrics& fm) {
    if (fm.expected_forks < 0.0) throw ParameterError("expected forks must be non-negative");
    return 1.0 / (2.0 + fm.expected_forks);
}

int required_confirmations(double p, double q, double target, int ceiling) {
    if (!(target > 0.0)) throw ParameterError("target probability must be positive");
    for (int m = 0; m <= ceiling; ++m) {
        if (modification_probability(p, q, m) <= target) return m;
    }
    throw ConvergenceError("no confirmation threshold up to " + std::to_string(ceiling) +
                           " reaches the target");
}

TradeoffReport evaluate_tradeoff(const PropagationProfile& profile, const SecurityParams& sec) {
    const auto& net = profile.net;
    sec.validate_against(net);
    TradeoffReport r;
    r.forks = fork_metrics(profile, net, profile.chain.servers);
    r.rates = attack_rates(sec, net, r.forks);
    r.throughput = throughput(net, sec, r.forks);
    r.throughput_bound = throughput_upper_bound(profile, sec, profile.chain.servers);
    const auto tc = confirmation_delay(sec, net, r.forks);
    r.confirm_delay = tc.delay_s;
    r.confirm_delay_bound = tc.bound_s;
    r.fault_tolerance = fault_tolerance(r.forks);
    r.p_modify = modification_probability(r.rates.p, r.rates.q, sec.confirmations);
    r.p_modify_unencrypted = modification_probability_unencrypted(r.rates.p, r.rates.q);
    return r;
}

}  // namespace blockprop

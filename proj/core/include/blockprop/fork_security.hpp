#pragma once

#include "blockprop/params.hpp"
#include "blockprop/propagation.hpp"

namespace blockprop {

struct ForkMetrics {
    double fork_prob = 0.0;       // p_k
    double expected_forks = 0.0;  // n_k
};

/// Σ_r ((n-r)/n) t_r: the window, in seconds, during which uninformed
/// servers keep extending the parent block.
double fork_exposure(const PropagationProfile& profile);

ForkMetrics fork_metrics(const PropagationProfile& profile, const NetworkParams& net, int servers);

/// Whole transactions that fit in a block after the header.
double transactions_per_block(const NetworkParams& net, const SecurityParams& sec);

double throughput(const NetworkParams& net, const SecurityParams& sec, const ForkMetrics& fm);
double throughput_upper_bound(const PropagationProfile& profile, const SecurityParams& sec, int servers);

struct ConfirmationDelay {
    double delay_s = 0.0;
    double bound_s = 0.0;
};

ConfirmationDelay confirmation_delay(const SecurityParams& sec, const NetworkParams& net, const ForkMetrics& fm);

/// Honest (p) and malicious (q) shares of the effective block rate once
/// forked honest work is discounted.
struct AttackRates {
    double p = 1.0;
    double q = 0.0;
};

AttackRates attack_rates(const SecurityParams& sec, const NetworkParams& net, const ForkMetrics& fm);

double catch_up_probability(double p, double q, int deficit);

/// Chance of winning once the data item is included, given the attacker had
/// mined n0 > m blocks while the honest chain reached m confirmations.
double win_after_inclusion(double p, double q, int confirmations, int n0);

inline constexpr double kDefaultTailTolerance = 1e-12;
inline constexpr long kDefaultTermBudget = 10'000'000;

double modification_probability(double p, double q, int confirmations,
                                double tail_tol = kDefaultTailTolerance,
                                long term_budget = kDefaultTermBudget);
double modification_probability_unencrypted(double p, double q);

double fault_tolerance(const ForkMetrics& fm);

inline constexpr int kDefaultConfirmationCeiling = 10'000;

int required_confirmations(double p, double q, double target, int ceiling = kDefaultConfirmationCeiling);

struct TradeoffReport {
    ForkMetrics forks;
    AttackRates rates;
    double throughput = 0.0;
    double throughput_bound = 0.0;
    double confirm_delay = 0.0;
    double confirm_delay_bound = 0.0;
    double fault_tolerance = 0.0;
    double p_modify = 0.0;
    double p_modify_unencrypted = 0.0;
};

TradeoffReport evaluate_tradeoff(const PropagationProfile& profile, const SecurityParams& sec);

}  // namespace blockprop

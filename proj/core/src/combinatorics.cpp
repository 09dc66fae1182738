#include "blockprop/combinatorics.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace blockprop::comb {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Extended precision keeps the cancellation in ratios of large coefficients
// well below the row-sum tolerance.
constexpr int kTabled = 4096;

long double log_factorial(int n) {
    static const std::vector<long double> table = [] {
        std::vector<long double> t(kTabled);
        for (int i = 0; i < kTabled; ++i) t[static_cast<std::size_t>(i)] = std::lgamma(static_cast<long double>(i) + 1.0L);
        return t;
    }();
    if (n < kTabled) return table[static_cast<std::size_t>(n)];
    return std::lgamma(static_cast<long double>(n) + 1.0L);
}

}  // namespace

double log_binomial(int n, int r) {
    if (n < 0 || r < 0 || r > n) return kNegInf;
    if (r == 0 || r == n) return 0.0;
    return static_cast<double>(log_factorial(n) - log_factorial(r) - log_factorial(n - r));
}

double binomial(int n, int r) {
    if (n < 0 || r < 0 || r > n) return 0.0;
    if (r == 0 || r == n) return 1.0;
    const double v = std::exp(log_binomial(n, r));
    // Snap to the integer the coefficient must be while doubles can hold it.
    return v < 0x1p53 ? std::round(v) : v;
}

double log_falling(int n, int r) {
    if (n < 0 || r < 0 || r > n) return kNegInf;
    if (r == 0) return 0.0;
    return static_cast<double>(log_factorial(n) - log_factorial(n - r));
}

double falling(int n, int r) {
    if (n < 0 || r < 0 || r > n) return 0.0;
    return std::exp(log_falling(n, r));
}

double hypergeometric(int good, int bad, int draws, int hits) {
    const double lg = log_binomial(good, hits) + log_binomial(bad, draws - hits) -
                      log_binomial(good + bad, draws);
    return std::isfinite(lg) ? std::exp(lg) : 0.0;
}

}  // namespace blockprop::comb

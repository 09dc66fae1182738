#pragma once

// Counting helpers evaluated in log space. Arguments outside the support
// (negative, or r > n) yield a count of zero rather than an error; callers
// that consider such arguments a bug check for them before calling.

namespace blockprop::comb {

/// ln C(n, r); -infinity when the coefficient is zero.
double log_binomial(int n, int r);

/// C(n, r) as a double.
double binomial(int n, int r);

/// ln A(n, r) = ln n!/(n-r)!; -infinity when zero.
double log_falling(int n, int r);

/// A(n, r), the number of ordered selections of r out of n.
double falling(int n, int r);

/// Hypergeometric mass: picking `draws` from `good + bad` items, exactly
/// `hits` of them good.
double hypergeometric(int good, int bad, int draws, int hits);

}  // namespace blockprop::comb

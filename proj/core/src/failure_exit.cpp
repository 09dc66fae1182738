#include "blockprop/failure_exit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "blockprop/combinatorics.hpp"

namespace blockprop {

namespace {

template <typename T>
using GridOf = std::vector<std::vector<T>>;  // grid[r][E]
using Grid = GridOf<double>;
// Restricted-chain weights can fall below the double range (n=50, k=25).
using WideGrid = GridOf<long double>;

template <typename T = double>
GridOf<T> make_grid(int n) {
    GridOf<T> g(static_cast<std::size_t>(n) + 1);
    for (int r = 1; r <= n; ++r) g[static_cast<std::size_t>(r)].assign(static_cast<std::size_t>(n - r) + 1, T{0});
    return g;
}

template <typename T>
T& at(GridOf<T>& g, const PropState& s) {
    return g[static_cast<std::size_t>(s.informed)][static_cast<std::size_t>(s.engaged)];
}

std::size_t idx(int v) { return static_cast<std::size_t>(v); }

}  // namespace

FailureModel::FailureModel(const ChainParams& params)
    : table_(TransitionTable::build(params)), rounds_(table_) {
    if (!table_.has_failure_states()) {
        throw ParameterError("failure states exist only for fanout <= servers - 3 (got n=" +
                             std::to_string(params.servers) + ", k=" + std::to_string(params.fanout) + ")");
    }
    const int n = params.servers;
    const int k = params.fanout;
    pascal_.assign(idx(n) + 1, {});
    for (int i = 0; i <= n; ++i) {
        auto& row = pascal_[idx(i)];
        row.assign(idx(i) + 1, 1.0);
        for (int j = 1; j < i; ++j) row[idx(j)] = pascal_[idx(i - 1)][idx(j - 1)] + pascal_[idx(i - 1)][idx(j)];
    }
    rows_.assign(idx(n), {});
    for (int I = k + 2; I <= n - 1; ++I) {
        auto& row = rows_[idx(I)];
        row.assign(idx(n - I) + 1, 0.0);
        for (int i = 0; i <= n - I; ++i) {
            double s = 0.0;
            for (int j = std::max(k + 2, i); j <= std::min(I + i, n); ++j) {
                s += rounds_.stall_mass(j) * comb::hypergeometric(n - I, I, j, i);
            }
            row[idx(i)] = s;
        }
    }
    compute_conditioned_round_times();
    compute_stall_durations();
}

void FailureModel::check_state(int informed) const {
    if (informed < first_state() || informed > last_state()) {
        throw ParameterError("failure state {" + std::to_string(informed) + ",0} outside [" +
                             std::to_string(first_state()) + ", " + std::to_string(last_state()) + "]");
    }
}

std::vector<double> FailureModel::transition_row(int informed) const {
    check_state(informed);
    return rows_[idx(informed)];
}

double FailureModel::escape_probability(int origin, int informed) const {
    check_state(origin);
    if (informed < origin || informed > last_state()) throw ParameterError("escape target out of range");
    // Summing the escaping tail avoids the cancellation in 1 - Σ_{j<=I}.
    const auto& row = rows_[idx(origin)];
    double s = 0.0;
    for (int j = informed + 1; j <= params().servers; ++j) s += row[idx(j - origin)];
    return s;
}

std::vector<double> FailureModel::conditioned_entry(int informed) const {
    check_state(informed);
    const int n = params().servers;
    const int k = params().fanout;
    const int cap = informed;
    const auto inside = [cap](const PropState& s) { return s.informed + s.engaged <= cap; };

    // h(s): probability of stalling inside the region, i.e. of the walk
    // never leaving I + E <= cap (I + E never decreases along a path).
    WideGrid h = make_grid<long double>(n);
    for (int r = cap; r >= 1; --r) {
        for (const auto& s : table_.round(r)) {
            if (!inside(s)) continue;
            if (s.engaged == 0) {
                at(h, s) = 1.0;
                continue;
            }
            long double v = 0.0L;
            for (const auto& t : table_.successors(s)) {
                if (inside(t.to)) v += t.probability * at(h, t.to);
            }
            at(h, s) = v;
        }
    }
    const PropState start{1, k};
    if (!(at(h, start) > 0.0L)) throw std::logic_error("restricted chain cannot reach a failure state");

    WideGrid mass = make_grid<long double>(n);
    at(mass, start) = 1.0L;
    std::vector<double> out(idx(cap - (k + 2)) + 1, 0.0);
    for (int r = 1; r <= cap; ++r) {
        for (const auto& s : table_.round(r)) {
            if (!inside(s)) continue;
            const long double m = at(mass, s);
            if (m == 0.0L) continue;
            if (s.engaged == 0) {
                out[idx(r - (k + 2))] = static_cast<double>(m);
                continue;
            }
            const long double hs = at(h, s);
            for (const auto& t : table_.successors(s)) {
                if (!inside(t.to)) continue;
                const long double ht = at(h, t.to);
                if (ht > 0.0L) at(mass, t.to) += m * t.probability * ht / hs;
            }
        }
    }
    return out;
}

std::vector<double> FailureModel::last_block(int informed) const {
    check_state(informed);
    const int k = params().fanout;
    const int lo = k + 2;
    const auto entry = conditioned_entry(informed);
    std::vector<double> alpha(entry.size(), 0.0);
    std::vector<double> out(entry.size(), 0.0);
    for (int l = lo; l <= informed; ++l) {
        double a = entry[idx(l - lo)];
        for (int i = lo; i < l; ++i) {
            a += alpha[idx(i - lo)] * rows_[idx(i)][idx(l - i)] / escape_probability(i, i);
        }
        alpha[idx(l - lo)] = a;
        const double stay = escape_probability(l, l);
        if (!(stay > 0.0)) {
            throw std::logic_error("failure state {" + std::to_string(l) + ",0} never escapes");
        }
        out[idx(l - lo)] = a * escape_probability(l, informed) / stay;
    }
    return out;
}

std::vector<double> FailureModel::round_of_transition(int informed, int origin) const {
    check_state(informed);
    if (origin < first_state() || origin > informed) {
        throw ParameterError("origin state must lie in [k+2, I]");
    }
    const int n = params().servers;
    const int a = informed - origin;
    const double beta = escape_probability(origin, informed);
    if (!(beta > 0.0)) throw std::logic_error("rescue block can never leave the failure region");

    std::vector<double> out(idx(informed) + 2, 0.0);
    for (int r = a + 1; r <= informed + 1; ++r) {
        // No stall before round r.
        const double survive = r == 1 ? 1.0 : rounds_.alive(r - 1);
        const double lg = comb::log_binomial(r - 1, a) + comb::log_falling(origin, r - a - 1) +
                          comb::log_falling(n - origin, a + 1) - comb::log_falling(n, r);
        if (!std::isfinite(lg)) continue;
        out[idx(r)] = survive * std::exp(lg) / beta;
    }
    return out;
}

void FailureModel::compute_conditioned_round_times() {
    const int n = params().servers;
    const int k = params().fanout;
    Grid mass = make_grid(n);
    at(mass, {1, k}) = 1.0;
    round_time_.assign(idx(n), 0.0);
    for (int r = 1; r <= n - 1; ++r) {
        double alive = 0.0;
        double inv = 0.0;
        for (const auto& s : table_.round(r)) {
            const double m = at(mass, s);
            if (s.engaged == 0 || m == 0.0) continue;
            alive += m;
            inv += m / s.engaged;
            const bool drop_stall = s.engaged == 1 && r >= k + 2 && r <= n - 2;
            double keep = 1.0;
            if (drop_stall) {
                keep = 0.0;
                for (const auto& t : table_.successors(s)) {
                    if (t.to.engaged != 0) keep += t.probability;
                }
            }
            for (const auto& t : table_.successors(s)) {
                if (drop_stall && t.to.engaged == 0) continue;
                at(mass, t.to) += m * t.probability / keep;
            }
        }
        round_time_[idx(r)] = alive > 0.0 ? inv / alive : 0.0;
    }
}

void FailureModel::compute_stall_durations() {
    const int n = params().servers;
    const int k = params().fanout;
    const int lo = k + 2;
    const int width = n - 1 - lo + 1;

    // hit[s][j - lo]: probability, from s, of stalling with exactly j informed.
    std::vector<Grid> hit(idx(width), make_grid(n));
    for (int r = n - 1; r >= 1; --r) {
        for (const auto& s : table_.round(r)) {
            if (s.engaged == 0) {
                if (r >= lo) at(hit[idx(r - lo)], s) = 1.0;
                continue;
            }
            for (const auto& t : table_.successors(s)) {
                if (t.to.informed == n) continue;
                for (int j = std::max(lo, t.to.informed); j <= n - 1; ++j) {
                    at(hit[idx(j - lo)], s) += t.probability * at(hit[idx(j - lo)], t.to);
                }
            }
        }
    }

    // Forward marginals without carried failure mass.
    Grid mass = make_grid(n);
    at(mass, {1, k}) = 1.0;
    stall_time_.assign(idx(n), 0.0);
    for (int r = 1; r <= n - 1; ++r) {
        for (const auto& s : table_.round(r)) {
            const double m = at(mass, s);
            if (s.engaged == 0 || m == 0.0) continue;
            for (int j = std::max(lo, r + 1); j <= n - 1; ++j) {
                stall_time_[idx(j)] += m * at(hit[idx(j - lo)], s) / s.engaged;
            }
            for (const auto& t : table_.successors(s)) at(mass, t.to) += m * t.probability;
        }
    }
}

TimeCoefficients FailureModel::exit_time(int informed) const {
    check_state(informed);
    const int n = params().servers;
    const int lo = first_state();
    const auto last = last_block(informed);
    TimeCoefficients out;
    for (int l = lo; l <= informed; ++l) {
        const double pl = last[idx(l - lo)];
        if (pl == 0.0) continue;
        const int a = informed - l;
        const auto rounds = round_of_transition(informed, l);
        for (int r = a + 1; r <= informed + 1; ++r) {
            const double pr = rounds[idx(r)];
            if (pr == 0.0) continue;
            const double denom = pascal_[idx(r - 1)][idx(a)];
            for (int j = a; j <= r - 1; ++j) {
                const double w = pl * pr * pascal_[idx(j)][idx(a)] / denom;
                if (j == 0) {
                    out.block += w;
                } else {
                    out.link += w * round_time_[idx(j)];
                }
            }
        }
    }
    // Self-loops: each failed rescue costs a block generation plus the
    // duration of its own (stalled) propagation.
    const double stay = rows_[idx(informed)][0];
    const double leave = escape_probability(informed, informed);
    const double pl = last[idx(informed - lo)];
    out.block += pl * stay / leave;
    double stalled_inside = 0.0;
    for (int j = lo; j <= informed; ++j) {
        stalled_inside += stall_time_[idx(j)] * std::exp(comb::log_binomial(informed, j) - comb::log_binomial(n, j));
    }
    out.link += pl * stalled_inside / leave;
    return out;
}

FailureExitTable build_failure_exit_table(const FailureModel& model, const NetworkParams& net) {
    net.validate();
    FailureExitTable t;
    t.chain = model.params();
    for (int I = model.first_state(); I <= model.last_state(); ++I) {
        t.entries.push_back({I, model.exit_time(I).seconds(net), model.transition_row(I)});
    }
    return t;
}

namespace {

std::map<int, double> keyed(const std::vector<double>& v, int first) {
    std::map<int, double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out[first + static_cast<int>(i)] = v[i];
    return out;
}

}  // namespace

std::map<int, double> failure_transition_row(const ChainParams& params, int informed) {
    return keyed(FailureModel(params).transition_row(informed), informed);
}

std::map<int, double> conditioned_entry_probs(const ChainParams& params, int informed) {
    return keyed(FailureModel(params).conditioned_entry(informed), params.fanout + 2);
}

std::map<int, double> last_block_state_dist(const ChainParams& params, int informed) {
    return keyed(FailureModel(params).last_block(informed), params.fanout + 2);
}

std::map<int, double> round_of_transition_dist(const ChainParams& params, int informed, int origin) {
    auto out = keyed(FailureModel(params).round_of_transition(informed, origin), 0);
    out.erase(0);
    return out;
}

double expected_failure_exit_time(const ChainParams& params, const NetworkParams& net, int informed) {
    net.validate();
    return FailureModel(params).exit_time(informed).seconds(net);
}

}  // namespace blockprop

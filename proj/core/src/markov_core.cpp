#include "blockprop/markov_core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "blockprop/combinatorics.hpp"
#include "probability.hpp"

namespace blockprop {

std::string_view to_string(StateType type) {
    switch (type) {
        case StateType::type_i: return "I";
        case StateType::type_ii: return "II";
        case StateType::type_iii: return "III";
        case StateType::type_iv: return "IV";
        case StateType::deterministic: return "deterministic";
    }
    return "?";
}

namespace {

// k = n - 1: the pool of n - 2 candidates is smaller than the fan-out, so the
// new server contacts everyone.
bool selects_everyone(const ChainParams& p) { return p.fanout > p.servers - 2; }

void check_state(const PropState& s, const ChainParams& p) {
    const int n = p.servers;
    if (s.informed < 1 || s.informed > n || s.engaged < 0 || s.informed + s.engaged > n) {
        throw ParameterError("state {" + std::to_string(s.informed) + "," +
                             std::to_string(s.engaged) + "} violates 1 <= I <= n, I + E <= n");
    }
    const auto range = engaged_range(p, s.informed);
    if (s.engaged < range.lo || s.engaged > range.hi) {
        throw ParameterError("state {" + std::to_string(s.informed) + "," +
                             std::to_string(s.engaged) + "} is outside the round's support [" +
                             std::to_string(range.lo) + "," + std::to_string(range.hi) + "]");
    }
}

}  // namespace

EngagedRange engaged_range(const ChainParams& p, int round) {
    p.validate();
    const int n = p.servers;
    const int k = p.fanout;
    if (round < 1 || round > n) throw ParameterError("round must lie in [1, n]");
    if (round == 1) return {k, k};
    if (selects_everyone(p)) return {n - round, n - round};
    return {std::max(k - round + 2, 0), std::min(round * k - round + 1, n - round)};
}

StateType classify_state(const PropState& s, const ChainParams& p) {
    check_state(s, p);
    const int n = p.servers;
    const int k = p.fanout;
    if (k >= n - 2) return StateType::deterministic;
    const int pool = s.informed + s.engaged - 2;
    const int uninformed = n - s.informed - s.engaged;
    if (pool < k) return uninformed >= k ? StateType::type_i : StateType::type_ii;
    return uninformed >= k ? StateType::type_iii : StateType::type_iv;
}

std::vector<Transition> one_step_transitions(const PropState& s, const ChainParams& p) {
    check_state(s, p);
    if (s.engaged < 1) {
        throw ParameterError("one-step rows exist only for states with engaged servers");
    }
    const int n = p.servers;
    const int k = p.fanout;
    const int pool = s.informed + s.engaged - 2;
    const int uninformed = n - s.informed - s.engaged;
    if (pool < 0 || uninformed < 0) throw std::logic_error("negative binomial argument");

    if (selects_everyone(p)) {
        return {{{s.informed + 1, s.engaged - 1 + uninformed}, 1.0}};
    }

    int e_lo = -1;
    int e_hi = k - 1;
    if (k < n - 2) {
        switch (classify_state(s, p)) {
            case StateType::type_i: e_lo = 0; break;
            case StateType::type_ii: e_lo = 0; e_hi = uninformed - 1; break;
            case StateType::type_iii: break;
            case StateType::type_iv: e_hi = uninformed - 1; break;
            case StateType::deterministic: break;
        }
    } else {
        e_hi = std::min(k, uninformed) - 1;
    }

    const double log_total = comb::log_binomial(n - 2, k);
    std::vector<Transition> row;
    row.reserve(static_cast<std::size_t>(std::max(e_hi - e_lo + 1, 0)));
    for (int e = e_lo; e <= e_hi; ++e) {
        const double lg = comb::log_binomial(pool, k - e - 1) +
                          comb::log_binomial(uninformed, e + 1) - log_total;
        if (!std::isfinite(lg)) continue;
        row.push_back({{s.informed + 1, s.engaged + e}, std::exp(lg)});
    }
    detail::tidy_row(row);
    return row;
}

TransitionTable::TransitionTable(const ChainParams& params) : params_(params) {}

TransitionTable TransitionTable::build(const ChainParams& params) {
    params.validate();
    const int n = params.servers;
    TransitionTable t(params);
    t.rounds_.assign(static_cast<std::size_t>(n) + 1, {});
    t.rounds_[1].push_back({1, params.fanout});

    std::vector<std::vector<std::vector<Transition>>> rows_by_round(static_cast<std::size_t>(n) + 1);
    for (int r = 1; r <= n; ++r) {
        auto& here = t.rounds_[static_cast<std::size_t>(r)];
        std::sort(here.begin(), here.end());
        here.erase(std::unique(here.begin(), here.end()), here.end());
        auto& rows = rows_by_round[static_cast<std::size_t>(r)];
        rows.resize(here.size());
        if (r == n) break;
        auto& next = t.rounds_[static_cast<std::size_t>(r) + 1];
        for (std::size_t i = 0; i < here.size(); ++i) {
            if (here[i].engaged == 0) continue;
            rows[i] = one_step_transitions(here[i], params);
            for (const auto& tr : rows[i]) next.push_back(tr.to);
        }
    }

    const auto width = static_cast<std::size_t>(n) + 1;
    t.lookup_.assign(width * width, -1);
    t.first_index_.assign(width, 0);
    for (int r = 1; r <= n; ++r) {
        t.first_index_[static_cast<std::size_t>(r)] = static_cast<int>(t.rows_.size());
        const auto& here = t.rounds_[static_cast<std::size_t>(r)];
        auto& rows = rows_by_round[static_cast<std::size_t>(r)];
        for (std::size_t i = 0; i < here.size(); ++i) {
            t.lookup_[static_cast<std::size_t>(here[i].informed) * width +
                      static_cast<std::size_t>(here[i].engaged)] = static_cast<int>(t.rows_.size());
            t.rows_.push_back(std::move(rows[i]));
        }
    }
    return t;
}

TransitionTable build_state_space(const ChainParams& params) { return TransitionTable::build(params); }

int TransitionTable::index_of(const PropState& s) const {
    const int n = params_.servers;
    if (s.informed < 1 || s.informed > n || s.engaged < 0 || s.engaged > n) return -1;
    return lookup_[static_cast<std::size_t>(s.informed) * (static_cast<std::size_t>(n) + 1) +
                   static_cast<std::size_t>(s.engaged)];
}

std::span<const PropState> TransitionTable::round(int r) const {
    if (r < 1 || r > params_.servers) throw ParameterError("round must lie in [1, n]");
    return rounds_[static_cast<std::size_t>(r)];
}

std::span<const Transition> TransitionTable::successors(const PropState& s) const {
    const int idx = index_of(s);
    if (idx < 0) throw ParameterError("state is not reachable");
    return rows_[static_cast<std::size_t>(idx)];
}

bool TransitionTable::contains(const PropState& s) const { return index_of(s) >= 0; }

std::vector<PropState> TransitionTable::states() const {
    std::vector<PropState> out;
    out.reserve(rows_.size());
    for (const auto& r : rounds_) out.insert(out.end(), r.begin(), r.end());
    return out;
}

int regime_of(const ChainParams& p) {
    p.validate();
    const int n = p.servers;
    const int k = p.fanout;
    if (k >= n - 2) return 4;
    if (2 * k > n - 2) return 3;
    const int c = (n - 1 + k - 1) / k;  // ceil((n-1)/k)
    return k + 2 < c ? 1 : 2;
}

namespace {

template <typename Lo, typename Hi>
void add_rounds(std::set<PropState>& out, int r_lo, int r_hi, Lo lo, Hi hi) {
    for (int r = r_lo; r <= r_hi; ++r) {
        for (int e = lo(r); e <= hi(r); ++e) out.insert({r, e});
    }
}

}  // namespace

CaseStateSpace case_state_space(const ChainParams& p) {
    const int regime = regime_of(p);
    const int n = p.servers;
    const int k = p.fanout;
    const int c = (n - 1 + k - 1) / k;

    CaseStateSpace out;
    out.regime = regime;
    auto& s = out.states;
    auto& s1 = out.by_type[0];
    auto& s2 = out.by_type[1];
    auto& s3 = out.by_type[2];
    auto& s4 = out.by_type[3];

    const auto grow_lo = [k](int r) { return k - r + 2; };
    const auto grow_hi = [k](int r) { return r * k - r + 1; };
    const auto cap = [n](int r) { return n - r; };
    const auto zero = [](int) { return 0; };
    const auto one = [](int) { return 1; };
    const auto slack = [n, k](int r) { return n - r - k; };
    const auto slack1 = [n, k](int r) { return n - r - k + 1; };

    s.insert({1, k});
    switch (regime) {
        case 1:
            add_rounds(s, 2, k + 1, grow_lo, grow_hi);
            add_rounds(s, k + 2, c - 1, zero, grow_hi);
            add_rounds(s, c, n, zero, cap);
            s1.insert({1, k});
            add_rounds(s3, 2, k, grow_lo, grow_hi);
            add_rounds(s3, k + 1, c - 2, one, grow_hi);
            add_rounds(s3, c - 1, n - k - 1, one, slack);
            break;
        case 2:
        case 3:
            add_rounds(s, 2, c - 1, grow_lo, grow_hi);
            add_rounds(s, c, k + 1, grow_lo, cap);
            add_rounds(s, k + 2, n, zero, cap);
            break;
        default:
            add_rounds(s, 2, n, cap, cap);
            return out;
    }
    if (regime == 2) {
        s1.insert({1, k});
        add_rounds(s3, 2, c - 2, grow_lo, grow_hi);
        add_rounds(s3, c - 1, k, grow_lo, slack);
        add_rounds(s3, k + 1, n - k - 1, one, slack);
    }
    if (regime == 1 || regime == 2) {
        add_rounds(s4, c - 1, c - 1, slack1, grow_hi);
        add_rounds(s4, c, n - k - 1, slack1, cap);
        add_rounds(s4, n - k, n - 1, one, cap);
    } else {
        s2.insert({1, k});
        add_rounds(s4, 2, k + 1, grow_lo, cap);
        add_rounds(s4, k + 2, n - 1, one, cap);
    }
    return out;
}

RoundDistributions::RoundDistributions(const TransitionTable& table) {
    const int n = table.servers();
    mass_.assign(static_cast<std::size_t>(n) + 1, {});
    stall_.assign(static_cast<std::size_t>(n) + 1, 0.0);
    for (int r = 1; r <= n; ++r) mass_[static_cast<std::size_t>(r)].assign(static_cast<std::size_t>(n - r) + 1, 0.0);
    mass_[1][static_cast<std::size_t>(table.fanout())] = 1.0;

    for (int r = 1; r < n; ++r) {
        const auto& here = mass_[static_cast<std::size_t>(r)];
        auto& next = mass_[static_cast<std::size_t>(r) + 1];
        next[0] += here[0];
        for (const auto& s : table.round(r)) {
            const double m = here[static_cast<std::size_t>(s.engaged)];
            if (s.engaged == 0 || m == 0.0) continue;
            for (const auto& t : table.successors(s)) {
                const double moved = m * t.probability;
                next[static_cast<std::size_t>(t.to.engaged)] += moved;
                if (t.to.engaged == 0) stall_[static_cast<std::size_t>(r) + 1] += moved;
            }
        }
    }
    if (n >= 1 && table.round(1).front().engaged == 0) stall_[1] = 1.0;
}

std::span<const double> RoundDistributions::at(int round) const {
    if (round < 1 || round > servers()) throw ParameterError("round must lie in [1, n]");
    return mass_[static_cast<std::size_t>(round)];
}

double RoundDistributions::stall_mass(int informed) const {
    if (informed < 1 || informed > servers()) throw ParameterError("informed count out of range");
    return stall_[static_cast<std::size_t>(informed)];
}

double RoundDistributions::stalled_by(int informed) const {
    double total = 0.0;
    for (int j = 1; j <= std::min(informed, servers() - 1); ++j) total += stall_[static_cast<std::size_t>(j)];
    return total;
}

double RoundDistributions::alive(int round) const {
    const auto m = at(round);
    double total = 0.0;
    for (std::size_t e = 1; e < m.size(); ++e) total += m[e];
    return total;
}

double RoundDistributions::failure_probability() const { return stalled_by(servers() - 1); }

std::map<PropState, double> multi_step_distribution(const ChainParams& params, int round) {
    const auto table = TransitionTable::build(params);
    const RoundDistributions dist(table);
    const auto mass = dist.at(round);
    std::map<PropState, double> out;
    for (const auto& s : table.round(round)) {
        out[s] = mass[static_cast<std::size_t>(s.engaged)];
    }
    // Failure mode carried in from earlier stalls lands on {r, 0} even when
    // the chain itself cannot stall in round r.
    if (mass[0] > 0.0) out[{round, 0}] = mass[0];
    return out;
}

}  // namespace blockprop

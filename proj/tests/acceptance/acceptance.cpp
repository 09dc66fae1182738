// One line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "blockprop/failure_exit.hpp"
#include "blockprop/fork_security.hpp"
#include "blockprop/markov_core.hpp"
#include "blockprop/propagation.hpp"
#include "report/commands.hpp"

using namespace blockprop;
using namespace blockprop::report;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (ok) return;
        if (pass) detail = what;
        pass = false;
    }
};

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

std::string fmt(double v) { return format_number(v); }

Outcome stochasticity() {
    Outcome o;
    double worst_step = 0.0, worst_fail = 0.0, worst_last = 0.0, worst_round = 0.0;
    for (int n = 5; n <= 50; n += 5) {
        for (int k = 1; k <= n - 1; ++k) {
            const ChainParams p{n, k};
            const auto table = build_state_space(p);
            for (const auto& s : table.states()) {
                if (s.engaged == 0) continue;
                double total = 0.0;
                for (const auto& t : table.successors(s)) total += t.probability;
                worst_step = std::max(worst_step, std::abs(total - 1.0));
            }
            if (!table.has_failure_states()) continue;
            const FailureModel m(p);
            for (int I = m.first_state(); I <= m.last_state(); ++I) {
                worst_fail = std::max(worst_fail, std::abs(sum(m.transition_row(I)) - 1.0));
                const auto last = m.last_block(I);
                worst_last = std::max(worst_last, std::abs(sum(last) - 1.0));
                for (int l = m.first_state(); l <= I; ++l) {
                    if (!(last[static_cast<std::size_t>(l - m.first_state())] > 0.0)) continue;
                    worst_round = std::max(worst_round, std::abs(sum(m.round_of_transition(I, l)) - 1.0));
                }
            }
        }
    }
    o.require(worst_step <= 1e-12, "one-step row off by " + fmt(worst_step));
    o.require(worst_fail <= 1e-10, "failure row off by " + fmt(worst_fail));
    o.require(worst_last <= 1e-8, "P{L} off by " + fmt(worst_last));
    o.require(worst_round <= 1e-8, "P{R|L} off by " + fmt(worst_round));
    if (o.pass) {
        o.detail = "max deviations " + fmt(worst_step) + " / " + fmt(worst_fail) + " / " + fmt(worst_last) + " / " +
                   fmt(worst_round);
    }
    return o;
}

Outcome regimes() {
    Outcome o;
    for (int k : {3, 6, 12, 19}) {
        const ChainParams p{20, k};
        const auto table = build_state_space(p);
        const auto closed = case_state_space(p);
        std::set<PropState> reached;
        std::array<std::set<PropState>, 4> typed;
        for (const auto& s : table.states()) {
            reached.insert(s);
            if (s.engaged == 0 || s.informed == p.servers) continue;
            const auto type = classify_state(s, p);
            if (type != StateType::deterministic) typed[static_cast<std::size_t>(type)].insert(s);
        }
        o.require(closed.regime == (k == 3 ? 1 : k == 6 ? 2 : k == 12 ? 3 : 4),
                  "k=" + std::to_string(k) + " in regime " + std::to_string(closed.regime));
        o.require(reached == closed.states, "state set differs at k=" + std::to_string(k));
        o.require(typed == closed.by_type, "type partition differs at k=" + std::to_string(k));
    }
    if (o.pass) o.detail = "n=20, k=3/6/12/19 in regimes 1/2/3/4";
    return o;
}

Outcome delay_bound() {
    Outcome o;
    const auto net = NetworkParams::from_megabytes(10.0, 1.0, 600.0);
    double worst_rel = 0.0, worst_abs = 0.0;
    for (int n = 10; n <= 50; ++n) {
        const auto b = delay_lower_bound(net, n);
        worst_rel = std::max(worst_rel, std::abs(b.logarithmic - b.harmonic) / b.harmonic);
        worst_abs = std::max(worst_abs, std::abs(propagation_delay({n, n - 1}, net) - b.harmonic));
    }
    o.require(worst_rel < 0.002, "log vs harmonic " + fmt(worst_rel));
    o.require(worst_abs < 1e-9, "t_p(n-1) vs harmonic " + fmt(worst_abs));
    if (o.pass) o.detail = "max rel gap " + fmt(worst_rel) + ", full fan-out gap " + fmt(worst_abs) + " s";
    return o;
}

Outcome bitcoin() {
    Outcome o;
    const auto profile = propagation_profile({30, 8}, NetworkParams::from_megabytes(10.0, 1.0, 600.0));
    const auto r = evaluate_tradeoff(profile, SecurityParams{});
    o.require(r.forks.expected_forks < 0.01, "n_k not negligible: " + fmt(r.forks.expected_forks));
    o.require(r.throughput >= 6.3 && r.throughput <= 7.4, "theta " + fmt(r.throughput));
    const double ft0 = fault_tolerance({0.0, 0.0});
    o.require(std::abs(ft0 - 0.5) <= 1e-12, "FT(0) " + fmt(ft0));
    if (o.pass) o.detail = "theta " + fmt(r.throughput) + " TPS at n_k " + fmt(r.forks.expected_forks) + ", FT(0) 0.5";
    return o;
}

// Quoted-CSV reader for the validate report.
std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells(1);
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            const char c = line[i];
            if (quoted && c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cells.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = !quoted;
            } else if (c == ',' && !quoted) {
                cells.emplace_back();
            } else {
                cells.back() += c;
            }
        }
        rows.push_back(cells);
    }
    return rows;
}

Outcome from_checks(const std::vector<std::vector<std::string>>& rows, const std::vector<std::string>& prefixes) {
    Outcome o;
    int gated = 0;
    double worst_z = 0.0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        bool wanted = false;
        for (const auto& p : prefixes) wanted |= row[0].rfind(p, 0) == 0;
        if (!wanted || row[6] == "info") continue;
        ++gated;
        if (row[6] == "z<=3") worst_z = std::max(worst_z, std::abs(std::stod(row[5])));
        o.require(row[7] == "pass", row[0] + " z=" + row[5]);
    }
    o.require(gated > 0, "no checks found");
    if (o.pass) o.detail = std::to_string(gated) + " checks, max |z| " + fmt(worst_z);
    return o;
}

Outcome attack_closed_forms() {
    Outcome o;
    double worst = 0.0;
    for (double p : {0.6, 0.75, 0.9}) {
        const double q = 1.0 - p;
        for (int m : {1, 6, 12}) {
            for (int gap : {1, 5, 20}) {
                const int n0 = m + gap;
                double s = 0.0;
                for (int n1 = 0; n1 <= n0 - m; ++n1) s += std::pow(p, n1) * q;
                for (int n1 = n0 - m + 1; n1 < 20000; ++n1) {
                    const double t = std::pow(p, n1) * q * std::pow(q / p, m + n1 - n0 + 1);
                    s += t;
                    if (t < 1e-18) break;
                }
                worst = std::max(worst, std::abs(win_after_inclusion(p, q, m, n0) - s));
            }
        }
    }
    o.require(worst <= 1e-10, "p(n0) series gap " + fmt(worst));
    double prev = 1.0;
    for (int m = 0; m <= 50; ++m) {
        const double pm = modification_probability(0.8, 0.2, m);
        o.require(pm <= prev, "p_m rises at m=" + std::to_string(m));
        prev = pm;
    }
    for (int d = 0; d <= 20; ++d) o.require(catch_up_probability(0.5, 0.5, d) == 1.0, "catch-up at p=q");
    if (o.pass) o.detail = "p(n0) series gap " + fmt(worst);
    return o;
}

Outcome tradeoff_shapes() {
    Outcome o;
    const PropagationModel model({30, 8});
    const SecurityParams sec;
    double prev_theta = 0.0, prev_tc = 1e300, prev_ft = 1.0;
    TradeoffReport last;
    // λ_b from 1/600 s to 10^3 /s.
    for (int i = 0; i <= 40; ++i) {
        const double rate = std::pow(10.0, std::log10(1.0 / 600.0) + i * (3.0 - std::log10(1.0 / 600.0)) / 40.0);
        last = evaluate_tradeoff(model.profile(NetworkParams::from_megabytes(10.0, 1.0, 1.0 / rate)), sec);
        o.require(last.throughput > prev_theta, "theta not increasing");
        o.require(last.throughput < last.throughput_bound, "theta above its bound");
        o.require(last.confirm_delay < prev_tc, "t_c not decreasing");
        o.require(last.fault_tolerance < prev_ft, "FT not decreasing in n_k");
        prev_theta = last.throughput;
        prev_tc = last.confirm_delay;
        prev_ft = last.fault_tolerance;
    }
    const double theta_gap = std::abs(last.throughput - last.throughput_bound) / last.throughput_bound;
    const double tc_gap = std::abs(last.confirm_delay - last.confirm_delay_bound) / last.confirm_delay_bound;
    o.require(theta_gap < 0.05, "theta(1e3/s) " + fmt(theta_gap) + " from bound");
    o.require(tc_gap < 0.05, "t_c(1e3/s) " + fmt(tc_gap) + " from bound");
    // Sweep grids: t_b from 10 min down to 10^-3 min, s_b from 1 MB up to 10^4 MB.
    double prev_pk = 0.0, prev_nk = 0.0;
    for (int i = 0; i <= 16; ++i) {
        const auto net = NetworkParams::from_megabytes(10.0, 1.0, 60.0 * std::pow(10.0, 1.0 - i / 4.0));
        const auto fm = fork_metrics(model.profile(net), net, 30);
        o.require(fm.fork_prob > prev_pk && fm.expected_forks > prev_nk, "p_k/n_k not increasing as t_b falls");
        prev_pk = fm.fork_prob;
        prev_nk = fm.expected_forks;
    }
    prev_pk = 0.0;
    prev_nk = 0.0;
    for (int i = 0; i <= 16; ++i) {
        const auto net = NetworkParams::from_megabytes(10.0, std::pow(10.0, i / 4.0), 600.0);
        const auto fm = fork_metrics(model.profile(net), net, 30);
        o.require(fm.fork_prob > prev_pk && fm.expected_forks > prev_nk, "p_k/n_k not increasing in s_b");
        prev_pk = fm.fork_prob;
        prev_nk = fm.expected_forks;
    }
    if (o.pass) o.detail = "theta gap " + fmt(theta_gap) + ", t_c gap " + fmt(tc_gap) + " at 1e3 blocks/s";
    return o;
}

void print_line(int id, const std::string& name, const Outcome& o, double seconds, int& failures) {
    std::printf("%s criterion %d (%s): %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str(),
                seconds);
    std::fflush(stdout);
    if (!o.pass) ++failures;
}

template <typename F>
Outcome timed(F&& f, double& seconds) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o = f();
    seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return o;
}

}  // namespace

int main() {
    int failures = 0;
    double s = 0.0;
    Outcome o;

    o = timed(stochasticity, s);
    o.require(s < 60.0, "took longer than a minute");
    print_line(1, "stochasticity", o, s, failures);
    o = timed(regimes, s);
    print_line(2, "state-space regimes", o, s, failures);
    o = timed(delay_bound, s);
    print_line(3, "delay bound", o, s, failures);
    o = timed(bitcoin, s);
    print_line(4, "Bitcoin baseline", o, s, failures);

    // Criteria 5-7 read the validate report; criterion 9 reruns it.
    const auto base = std::filesystem::temp_directory_path() / "blockprop_acceptance";
    std::filesystem::remove_all(base);
    const auto cfg = parse_config(R"({"simulation": {"seed": 1}})");
    Options first, second;
    first.out = base / "first";
    second.out = base / "second";
    double validate_s = 0.0;
    CommandResult run;
    timed([&] {
        run = cmd_validate(cfg, first);
        return Outcome{};
    }, validate_s);
    const auto rows = read_csv(run.files.front());

    o = from_checks(rows, {"p_f", "curve_time(n=10,k=2,t_b=600", "n_k(n=10"});
    print_line(5, "simulation cross-checks", o, validate_s, failures);
    o = from_checks(rows, {"exit_time", "P{L=l}"});
    print_line(6, "failure-exit oracle", o, 0.0, failures);
    o = from_checks(rows, {"p_m", "catch_up"});
    const auto closed = attack_closed_forms();
    o.require(closed.pass, closed.detail);
    if (o.pass) o.detail += "; " + closed.detail;
    print_line(7, "attack model", o, 0.0, failures);

    o = timed(tradeoff_shapes, s);
    print_line(8, "trade-off shapes", o, s, failures);

    o = timed([&] {
        Outcome d;
        const auto again = cmd_validate(cfg, second);
        std::ifstream a(run.files.front(), std::ios::binary), b(again.files.front(), std::ios::binary);
        std::stringstream sa, sb;
        sa << a.rdbuf();
        sb << b.rdbuf();
        d.require(!sa.str().empty() && sa.str() == sb.str(), "validate reports differ");
        if (d.pass) d.detail = std::to_string(sa.str().size()) + " identical bytes";
        return d;
    }, s);
    print_line(9, "determinism", o, s, failures);

    std::printf("%d of 9 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}

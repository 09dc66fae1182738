#include <doctest.h>

#include <cmath>
#include <numeric>

#include "blockprop/failure_exit.hpp"

using namespace blockprop;

namespace {

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

}  // namespace

TEST_CASE("failure model needs room for a stall") {
    CHECK_THROWS_AS(FailureModel({10, 8}), ParameterError);
    CHECK_THROWS_AS(FailureModel({10, 9}), ParameterError);
    CHECK_NOTHROW(FailureModel({10, 7}));
    const FailureModel m({10, 2});
    CHECK(m.first_state() == 4);
    CHECK(m.last_state() == 9);
    CHECK_THROWS_AS(m.transition_row(3), ParameterError);
    CHECK_THROWS_AS(m.exit_time(10), ParameterError);
    CHECK_THROWS_AS(m.round_of_transition(6, 7), ParameterError);
}

TEST_CASE("failure rows conserve the rescue block's mass") {
    // The rescue propagation either stalls somewhere or informs everyone,
    // so each row is a full distribution over {I+i, 0} and {n, .}.
    for (int n : {8, 10, 20, 35}) {
        for (int k = 1; k <= n - 3; ++k) {
            const FailureModel m({n, k});
            for (int I = m.first_state(); I <= m.last_state(); ++I) {
                const auto row = m.transition_row(I);
                CHECK(row.size() == static_cast<std::size_t>(n - I + 1));
                CHECK(std::abs(sum(row) - 1.0) < 1e-10);
                for (double p : row) CHECK(p >= 0.0);
            }
        }
    }
}

TEST_CASE("last-block and round distributions normalise") {
    for (int n : {10, 25, 50}) {
        for (int k : {1, 2, n / 2 - 1, n - 3}) {
            if (k < 1) continue;
            const FailureModel m({n, k});
            for (int I = m.first_state(); I <= m.last_state(); ++I) {
                CHECK(std::abs(sum(m.conditioned_entry(I)) - 1.0) < 1e-10);
                const auto last = m.last_block(I);
                CHECK(std::abs(sum(last) - 1.0) < 1e-8);
                for (int l = m.first_state(); l <= I; ++l) {
                    if (last[static_cast<std::size_t>(l - m.first_state())] < 1e-300) continue;
                    const auto rounds = m.round_of_transition(I, l);
                    CHECK(rounds[0] == 0.0);
                    CHECK(std::abs(sum(rounds) - 1.0) < 1e-8);
                }
            }
        }
    }
}

TEST_CASE("escape probability is the tail of the row") {
    const FailureModel m({12, 3});
    CHECK(m.escape_probability(m.last_state(), m.last_state()) == doctest::Approx(1.0 - m.transition_row(11)[0]));
    CHECK(m.escape_probability(5, 6) <= m.escape_probability(5, 5));
    CHECK(std::abs(m.escape_probability(5, 5) - (1.0 - m.transition_row(5)[0])) < 1e-12);
}

TEST_CASE("conditioned entry survives extreme restriction") {
    // h-transform weights here fall below the double range.
    const FailureModel m({50, 25});
    const auto entry = m.conditioned_entry(27);
    REQUIRE(entry.size() == 1);
    CHECK(entry[0] == doctest::Approx(1.0));
}

TEST_CASE("large fan-out exits in about one block time") {
    const auto net = NetworkParams::from_megabytes(10.0, 1.0, 600.0);
    const FailureModel m({10, 5});
    for (int I = 7; I <= 9; ++I) {
        const double t = m.exit_time(I).seconds(net);
        CHECK(t > 600.0);
        CHECK(t < 601.0);
    }
    CHECK(expected_failure_exit_time({10, 5}, net, 7) == doctest::Approx(600.2525463081));
}

TEST_CASE("exit time is linear in link and block time") {
    const FailureModel m({10, 2});
    const auto c = m.exit_time(6);
    const auto a = NetworkParams::from_megabytes(10.0, 1.0, 600.0);
    const auto b = NetworkParams::from_megabytes(20.0, 3.0, 60.0);
    CHECK(c.seconds(a) == doctest::Approx(c.link * 0.8 + c.block * 600.0));
    CHECK(c.seconds(b) == doctest::Approx(c.link * 1.2 + c.block * 60.0));
    CHECK(c.block > 0.0);
}

TEST_CASE("origin distribution at n=10, k=2, I=6") {
    const auto dist = last_block_state_dist({10, 2}, 6);
    REQUIRE(dist.size() == 3);
    CHECK(dist.at(4) == doctest::Approx(0.0202362986).epsilon(1e-8));
    CHECK(dist.at(5) == doctest::Approx(0.1627984994).epsilon(1e-8));
    CHECK(dist.at(6) == doctest::Approx(0.8169652021).epsilon(1e-8));
}

TEST_CASE("keyed wrappers") {
    const auto row = failure_transition_row({10, 2}, 6);
    CHECK(row.begin()->first == 6);
    CHECK(row.rbegin()->first == 10);
    const auto entry = conditioned_entry_probs({10, 2}, 6);
    CHECK(entry.begin()->first == 4);
    const auto rounds = round_of_transition_dist({10, 2}, 6, 5);
    CHECK(rounds.begin()->first == 1);
    CHECK(rounds.rbegin()->first == 7);

    const FailureModel m({10, 2});
    const auto table = build_failure_exit_table(m, NetworkParams::from_megabytes(10.0, 1.0, 600.0));
    CHECK(table.entries.size() == 6);
    CHECK(table.entries.front().informed == 4);
}

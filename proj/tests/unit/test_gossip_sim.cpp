#include <doctest.h>

#include <cmath>

#include "blockprop/fork_security.hpp"
#include "blockprop/gossip_sim.hpp"
#include "blockprop/propagation.hpp"

using namespace blockprop;

namespace {

SimConfig config(ChainParams chain, double block_time_s, long reps, SimMode mode = SimMode::propagation) {
    SimConfig c{chain, NetworkParams::from_megabytes(10.0, 1.0, block_time_s), reps, 11, mode};
    c.threads = 1;
    return c;
}

void same(const Estimate& a, const Estimate& b) {
    CHECK(a.mean == b.mean);
    CHECK(a.std_error == b.std_error);
}

}  // namespace

TEST_CASE("mode names round-trip") {
    for (auto m : {SimMode::propagation, SimMode::forking, SimMode::failure_exit, SimMode::race}) {
        CHECK(sim_mode_from_string(to_string(m)) == m);
    }
    CHECK_THROWS_AS(sim_mode_from_string("gossip"), ParameterError);
}

TEST_CASE("results do not depend on thread count") {
    auto one = config({10, 2}, 1.0, 3000, SimMode::forking);
    auto four = one;
    four.threads = 4;
    const auto a = simulate(one);
    const auto b = simulate(four);
    same(a.failure_freq, b.failure_freq);
    same(a.fork_counts, b.fork_counts);
    CHECK(a.delay_samples.median == b.delay_samples.median);
    for (std::size_t i = 0; i < a.informed_curve_mean.size(); ++i) {
        same(a.informed_curve_mean[i], b.informed_curve_mean[i]);
    }
    CHECK(a.rng == "philox4x32-10");
    CHECK(a.seed == 11);
}

TEST_CASE("seed changes the sample") {
    auto a = config({10, 2}, 600.0, 2000);
    auto b = a;
    b.seed = 12;
    CHECK(simulate(a).delay_samples.mean != simulate(b).delay_samples.mean);
}

TEST_CASE("two servers take one exponential link time") {
    const auto r = simulate(config({2, 1}, 600.0, 40000));
    CHECK(r.failure_freq.mean == 0.0);
    CHECK(std::abs(r.delay_samples.mean - 0.8) < 4.0 * r.delay_samples.std_error);
    CHECK(r.informed_curve_mean.size() == 2);
    CHECK(r.informed_curve_mean[0].mean == 0.0);
}

TEST_CASE("full fan-out never stalls and matches the harmonic delay") {
    const auto r = simulate(config({12, 11}, 600.0, 20000));
    CHECK(r.failure_freq.mean == 0.0);
    const double t = propagation_delay({12, 11}, NetworkParams::from_megabytes(10.0, 1.0, 600.0));
    CHECK(std::abs(r.delay_samples.mean - t) < 4.0 * r.delay_samples.std_error);
    CHECK(r.delay_samples.min <= r.delay_samples.q05);
    CHECK(r.delay_samples.q05 <= r.delay_samples.median);
    CHECK(r.delay_samples.median <= r.delay_samples.q95);
    CHECK(r.delay_samples.q95 <= r.delay_samples.max);
}

TEST_CASE("stall frequency near the model at n=10, k=3") {
    const auto r = simulate(config({10, 3}, 600.0, 40000));
    CHECK(std::abs(r.failure_freq.mean - failure_probability({10, 3})) < 4.0 * r.failure_freq.std_error);
}

TEST_CASE("fork frequency stays below the Poisson bound") {
    // p_k = 1 - exp(-n_k) treats the exposure as fixed; averaging over the
    // random propagation time can only lower the fork probability.
    auto c = config({10, 2}, 1.0, 20000, SimMode::forking);
    const auto r = simulate(c);
    const auto fm = fork_metrics(propagation_profile({10, 2}, c.net), c.net, 10);
    CHECK(r.fork_freq.mean <= fm.fork_prob);
    CHECK(std::abs(r.fork_counts.mean - fm.expected_forks) < 4.0 * r.fork_counts.std_error);
}

TEST_CASE("failure exit modes") {
    auto c = config({10, 2}, 600.0, 2000, SimMode::failure_exit);
    c.failure_state = 6;
    const auto exact = simulate(c);
    CHECK(exact.exit_time.mean > 0.0);
    CHECK(exact.attempts == 2000);

    c.exit_sampling = ExitSampling::through;
    const auto through = simulate(c);
    CHECK(through.attempts > 2000);
    double total = 0.0;
    for (const auto& [l, e] : through.origin_freq) {
        CHECK(l >= 4);
        CHECK(l <= 6);
        total += e.mean;
    }
    CHECK(total == doctest::Approx(1.0));

    c.failure_state = 3;
    CHECK_THROWS_AS(simulate(c), ParameterError);
    c.chain = {10, 8};
    c.failure_state = 9;
    CHECK_THROWS_AS(simulate(c), ParameterError);
}

TEST_CASE("race edge cases") {
    RaceConfig rc;
    rc.threads = 1;
    rc.replications = 1000;
    rc.p = 1.0;
    rc.q = 0.0;
    CHECK(simulate_race(rc).race_win_freq.mean == 0.0);
    rc.p = 0.8;
    rc.q = 0.2;
    CHECK(simulate_catch_up(rc, 0).race_win_freq.mean == 1.0);
    rc.q = 0.3;
    CHECK_THROWS_AS(simulate_race(rc), ParameterError);
}

TEST_CASE("fair race is capped, not abandoned") {
    RaceConfig rc;
    rc.threads = 1;
    rc.replications = 200;
    rc.p = 0.5;
    rc.q = 0.5;
    rc.step_cap = 50;
    const auto r = simulate_catch_up(rc, 30);
    CHECK(r.race_cap_hit_freq > 0.9);
}

TEST_CASE("bad configurations") {
    auto c = config({10, 2}, 600.0, 0);
    CHECK_THROWS_AS(simulate(c), ParameterError);
    c = config({10, 10}, 600.0, 10);
    CHECK_THROWS_AS(simulate(c), ParameterError);
}

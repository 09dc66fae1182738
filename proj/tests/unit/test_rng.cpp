#include <doctest.h>

#include <cmath>
#include <set>

#include "blockprop/rng.hpp"

using namespace blockprop;

TEST_CASE("philox known-answer vectors") {
    using C = Philox4x32::Counter;
    CHECK(Philox4x32::block({0, 0, 0, 0}, {0, 0}) == C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(Philox4x32::block({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(Philox4x32::block({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible and distinct") {
    Philox4x32 a(7, 3), b(7, 3), c(7, 4), d(8, 3);
    std::set<std::uint32_t> firsts;
    for (int i = 0; i < 100; ++i) {
        const auto x = a();
        CHECK(x == b());
        if (i == 0) {
            firsts.insert(x);
            firsts.insert(c());
            firsts.insert(d());
        }
    }
    CHECK(firsts.size() == 3);
}

TEST_CASE("derived distributions") {
    Philox4x32 g(1, 0);
    double sum = 0.0;
    double exp_sum = 0.0;
    long counts[5] = {};
    const int draws = 200000;
    for (int i = 0; i < draws; ++i) {
        const double u = g.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        sum += u;
        exp_sum += g.exponential(2.5);
        ++counts[g.below(5)];
    }
    CHECK(std::abs(sum / draws - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / draws));
    CHECK(std::abs(exp_sum / draws - 2.5) < 4.0 * 2.5 / std::sqrt(draws));
    for (long c : counts) CHECK(std::abs(c - draws / 5.0) < 4.0 * std::sqrt(draws * 0.2 * 0.8));
    CHECK(g.below(1) == 0u);
}

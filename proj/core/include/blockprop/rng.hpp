#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace blockprop {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11). Each
/// (seed, stream) pair is an independent sequence; replications use their
/// index as the stream so results do not depend on scheduling.
class Philox4x32 {
public:
    using result_type = std::uint32_t;
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static constexpr std::string_view kName = "philox4x32-10";

    static Counter block(Counter counter, Key key);

    Philox4x32(std::uint64_t seed, std::uint64_t stream);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return 0xffffffffu; }
    result_type operator()();

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    /// Exponential with the given mean.
    double exponential(double mean);
    /// Uniform integer in [0, bound), bound >= 1.
    std::uint32_t below(std::uint32_t bound);

private:
    Key key_;
    Counter counter_;
    Counter buffer_{};
    int used_ = 4;
};

}  // namespace blockprop

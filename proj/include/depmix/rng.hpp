#pragma once

#include <cstdint>

namespace depmix::rng {

// Counter-based random bits: Philox4x32-10 keyed by a 64-bit seed, with the
// 128-bit counter split as (index, stream). Every draw is a pure function of
// (seed, stream, index), so replicas can be generated in any order, an
// individual innovation can be re-drawn or swapped without touching its
// neighbours, and parallel schedules are bit-identical to sequential runs.
std::uint64_t bits(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

// Uniform on the open interval (0, 1), 53-bit resolution.
double uniform01(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

// Standard normal via the inverse CDF (Wichura's AS 241, double precision).
double normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

// Quantile function of the standard normal, exposed for tests and oracles.
double inv_phi(double p);

// Standard normal CDF.
double phi_cdf(double x);

// Stream identifiers. A stream binds a substream class to a replica index;
// classes keep base innovations, their independent star copy, scenery values,
// centering pre-passes and bootstrap draws on disjoint counters.
enum class StreamClass : std::uint64_t {
    Base = 0,
    Star = 1,
    Scenery = 2,
    Center = 3,
    Bootstrap = 4,
    Probe = 5,
    Subsample = 6,
};

constexpr std::uint64_t stream_id(StreamClass cls, std::uint64_t replica) {
    return (static_cast<std::uint64_t>(cls) << 48) | (replica & 0xFFFFFFFFFFFFull);
}

// Signed innovation indices map to counters via two's complement.
constexpr std::uint64_t index_of(std::int64_t i) {
    return static_cast<std::uint64_t>(i);
}

} // namespace depmix::rng

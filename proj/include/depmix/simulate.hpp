#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "depmix/filters.hpp"
#include "depmix/parallel.hpp"

namespace depmix {

// Contiguous set of innovation indices served from the star stream instead
// of the base stream. Outside the range the coupled stream is bit-identical
// to the base stream. lo == kMinusInfinity means "all indices <= hi".
struct SwapRange {
    static constexpr std::int64_t kMinusInfinity = std::numeric_limits<std::int64_t>::min();

    std::int64_t lo = 1;
    std::int64_t hi = 0;

    static SwapRange none() { return SwapRange{1, 0}; }
    static SwapRange single(std::int64_t index) { return SwapRange{index, index}; }
    static SwapRange block(std::int64_t lo, std::int64_t hi) { return SwapRange{lo, hi}; }
    static SwapRange up_to(std::int64_t hi) { return SwapRange{kMinusInfinity, hi}; }

    bool empty() const { return lo != kMinusInfinity && lo > hi; }
    bool contains(std::int64_t i) const {
        return (lo == kMinusInfinity || i >= lo) && i <= hi;
    }
};

enum class CenteringMode { None, Analytic, MonteCarlo };

struct CenteringInfo {
    CenteringMode mode = CenteringMode::None;
    std::int64_t mc_replicas = 0; // pre-pass sample size when mode == MonteCarlo
};

// A seeded collection of simulated triangular-array paths, possibly
// restricted to a subset of series indices (columns). Values are a pure
// function of (seed, filter, n, replicas), independent of the execution
// schedule; sliced simulations agree bit-for-bit with full ones.
struct PathEnsemble {
    std::int64_t n = 0;
    std::int64_t replicas = 0;
    std::uint64_t seed = 0;
    FilterSpec filter;
    std::vector<std::int64_t> columns; // ascending series indices, 1-based
    std::vector<double> values;        // replicas x columns.size(), row-major
    double truncation_tail = 0.0;      // sup_t sum_{k > L} |c_k(t)|
    CenteringInfo centering;
    std::vector<std::string> warnings;

    std::int64_t col_offset(std::int64_t series_index) const;
    double at(std::int64_t replica, std::int64_t series_index) const;
    std::span<const double> row(std::int64_t replica) const;
};

struct SimulateOptions {
    SwapRange star = SwapRange::none();
    Exec exec = Exec::Parallel;
    CenteringMode centering_override = CenteringMode::Analytic; // used when filter.centered
    std::int64_t mc_center_replicas = 1'000'000;
};

// Simulates X_{i,n} = G(i/n, F_i) for all i = 1..n.
PathEnsemble simulate(const FilterSpec& filter, std::int64_t n, std::int64_t replicas,
                      std::uint64_t seed, const SimulateOptions& opts = {});

// Simulates only the requested series indices.
PathEnsemble simulate_columns(const FilterSpec& filter, std::int64_t n,
                              std::int64_t replicas, std::span<const std::int64_t> cols,
                              std::uint64_t seed, const SimulateOptions& opts = {});

// Single-value reference evaluator: recomputes X_{i,n} for one replica from
// first principles, with no shared buffers. Kept as the slow independent
// check for the optimized kernels.
double simulate_value_reference(const FilterSpec& filter, std::int64_t n, std::int64_t replica,
                                std::int64_t series_index, std::uint64_t seed,
                                SwapRange star = SwapRange::none());

struct MomentEstimate {
    double value = 0.0;
    double stderr_value = 0.0;
    bool nonconvergent = false;
    std::int64_t replicas = 0;
};

// Monte-Carlo estimate of E|X_{i,n}|^p over the ensemble's replicas. The
// nonconvergent flag combines a max-share diagnostic with first-half drift;
// it fires for heavy tails without a finite p-th moment.
MomentEstimate marginal_moment(const PathEnsemble& ensemble, std::int64_t series_index, double p);

} // namespace depmix

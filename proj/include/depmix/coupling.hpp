#pragma once

#include <cstdint>
#include <vector>

#include "depmix/simulate.hpp"

namespace depmix {

// Paired scalar draws (G(t, F_i), G(t, F_i*)) sharing all innovations except
// the one at index 0, which the star side replaces with an independent copy.
struct PairSample {
    double t = 0.0;
    std::int64_t lag = 0;
    std::vector<double> base; // replicas
    std::vector<double> star; // replicas
};

PairSample single_swap_pair(const FilterSpec& filter, double t, std::int64_t lag,
                            std::int64_t replicas, std::uint64_t seed,
                            Exec exec = Exec::Parallel);

// Paired blocks (X_{j+k,n},...,X_{n,n}) evaluated on two coupled streams
// whose star blocks end at j and differ by the single index j - ell: the
// lhs stars [j-ell+1, j] (empty when ell = 0) and the rhs stars [j-ell, j].
// Per coordinate i, E|lhs_i - rhs_i| is bounded by delta_1(G, i + ell).
struct BlockPairSample {
    std::int64_t j = 0, k = 0, n = 0, ell = 0;
    std::int64_t nu = 0;      // block length n - j - k + 1
    std::vector<double> lhs;  // replicas x nu
    std::vector<double> rhs;  // replicas x nu
};

BlockPairSample block_swap_pair(const FilterSpec& filter, std::int64_t j, std::int64_t k,
                                std::int64_t n, std::int64_t ell, std::int64_t replicas,
                                std::uint64_t seed, Exec exec = Exec::Parallel);

// Joint realizations of the past block, the future block, and the tilde
// block that replaces every innovation with index <= j by its star copy.
// The tilde block is independent of the past block by construction and has
// the same marginal law as the future block.
struct CoupledEnsemble {
    std::int64_t j = 0, k = 0, n = 0;
    std::int64_t nu = 0;
    std::int64_t replicas = 0;
    std::vector<double> past;    // replicas x j       (X_{1,n} .. X_{j,n})
    std::vector<double> x;       // replicas x nu      (X_{j+k,n} .. X_{n,n})
    std::vector<double> x_tilde; // replicas x nu

    // Weighted l1 coupling cost sum_m w_m |x_m - xt_m| per replica.
    std::vector<double> coupling_costs(std::span<const double> weights) const;
};

CoupledEnsemble tilde_ensemble(const FilterSpec& filter, std::int64_t j, std::int64_t k,
                               std::int64_t n, std::int64_t replicas, std::uint64_t seed,
                               Exec exec = Exec::Parallel);

} // namespace depmix

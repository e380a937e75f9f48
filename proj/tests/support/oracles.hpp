#pragma once

// Test-side oracles, independent of the library's estimation paths.

#include <cstdint>
#include <span>
#include <vector>

namespace oracles {

struct ExactMixing {
    double beta = 0.0;
    double alpha = 0.0;
    std::int64_t past_cells = 0;
    std::int64_t future_cells = 0;
};

// Exact window pmf of the random-walk-in-scenery process by enumerating all
// 2^n walks and the scenery assignments on the sites each window reads.
// Windows: past (X_{j-a+1..j}), future (X_{j+k..j+k+b-1}).
ExactMixing rws_exact_mixing(std::int64_t n, std::int64_t j, std::int64_t k, std::int64_t a,
                             std::int64_t b);

// Exact alpha by enumerating every pair of cell subsets (use only for
// small matrices).
double alpha_bruteforce(std::span<const double> d, std::int64_t n_rows, std::int64_t n_cols);

// P(X in [a1,b1], Y in [a2,b2]) for a standard bivariate normal with
// correlation r, by outer quadrature of the conditional normal CDF.
double binormal_rect(double a1, double b1, double a2, double b2, double r);

// Exact beta of the bivariate normal pair (X, Y) ~ corr r quantized to the
// same `bins` equal-mass cells per coordinate (population quantile edges).
double gaussian_pair_beta_exact(double r, int bins);

} // namespace oracles

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "depmix/measure.hpp"
#include "depmix/simulate.hpp"

namespace depmix {

// Quantization of window coordinates.
//  - Quantile: equal-mass bins per coordinate from empirical marginal
//    quantiles (stable cell occupancy for skewed marginals).
//  - Dyadic: equal-width bins of width 2^-depth aligned at integer
//    multiples, one depth per coordinate; depth < 0 ignores the coordinate.
struct BinScheme {
    enum class Kind { Quantile, Dyadic };
    Kind kind = Kind::Quantile;
    int bins = 8;
    std::vector<int> past_depths;
    std::vector<int> future_depths;

    static BinScheme quantile(int bins);
    static BinScheme dyadic(std::vector<int> past_depths, std::vector<int> future_depths);
};

struct MixingOptions {
    std::int64_t min_cell = 50; // smallest usable past-cell count
    bool auto_widen = true;     // halve quantile bins until occupancy holds
    int bootstrap_resamples = 50;
    int bootstrap_blocks = 64;
    std::uint64_t seed = 1;
    Exec exec = Exec::Parallel;
};

// One (k, window) mixing estimate. All values are plug-in functionals of
// the quantized empirical joint law, hence lower-bound estimates of the
// true coefficients (finite windows, finite bins). beta_null re-pairs past
// and future across replicas, which is exactly independent with the same
// marginals; beta_corrected subtracts that noise floor.
struct MixingEstimate {
    std::int64_t gap = 0;
    double beta_raw = 0.0;
    double beta_null = 0.0;
    double beta_corrected = 0.0;
    double alpha = 0.0;
    bool alpha_exact = true;
    double stderr_beta = 0.0;
    double stderr_alpha = 0.0;
    std::int64_t past_cells = 0;
    std::int64_t future_cells = 0;
    std::int64_t min_past_count = 0;
    int bins_used = 0; // quantile bins after widening (0 for dyadic)
    std::int64_t replicas = 0;
};

// Estimators on an R x (a+b) matrix whose first a columns are the past
// window and last b columns the future window.
MixingEstimate estimate_windows(std::span<const double> data, std::int64_t replicas,
                                std::int64_t a, std::int64_t b, const BinScheme& scheme,
                                const MixingOptions& options);

// Windowed estimators on a simulated ensemble: past (X_{j-a+1..j}), future
// (X_{j+k..j+k+b-1}).
MixingEstimate mixing_estimate(const PathEnsemble& ensemble, std::int64_t j, std::int64_t k,
                               std::int64_t a, std::int64_t b, const BinScheme& scheme,
                               const MixingOptions& options);

double beta_hat(const PathEnsemble& ensemble, std::int64_t j, std::int64_t k, std::int64_t a,
                std::int64_t b, int bins, std::uint64_t seed);

double alpha_hat(const PathEnsemble& ensemble, std::int64_t j, std::int64_t k, std::int64_t a,
                 std::int64_t b, int bins, std::uint64_t seed);

struct MixingPolicy {
    std::int64_t n = 256;
    std::int64_t j = -1; // default ceil(n/2)
    std::int64_t a = 2;
    std::int64_t b = 2;
    BinScheme scheme;
    std::int64_t replicas = 1'000'000;
    MixingOptions options;
    Exec exec = Exec::Parallel;

    std::int64_t resolved_j() const { return j >= 1 ? j : (n + 1) / 2; }
};

// Profile over a list of gaps. The sup over (n, j) in the definitions is
// replaced by this policy's declared pair, recorded in the metadata.
struct MixingProfile {
    std::vector<std::int64_t> gaps;
    std::vector<MixingEstimate> estimates;
    MixingPolicy policy;
    std::string filter_description;
};

MixingProfile mixing_profile(const FilterSpec& filter, std::span<const std::int64_t> gaps,
                             const MixingPolicy& policy);

void write_mixing_csv(const MixingProfile& profile, const std::filesystem::path& path);
void write_mixing_json(const MixingProfile& profile, const std::filesystem::path& path);

// Exact maximizer of |P(S x T) - mu(S) nu(T)| over unions of cells, for the
// signed matrix d = pi - mu x nu. Enumerates subsets of the smaller side
// when feasible (the split of the other side is then a pure sign split);
// otherwise falls back to alternating sign-split ascent, a documented lower
// bound. Exposed for tests.
struct AlphaSolve {
    double value = 0.0;
    bool exact = true;
    std::vector<std::uint8_t> s_side; // indicator over the smaller side
    std::vector<std::uint8_t> t_side;
    bool transposed = false;
};

AlphaSolve alpha_max_bilinear(std::span<const double> d, std::int64_t n_rows,
                              std::int64_t n_cols, std::uint64_t seed);

} // namespace depmix

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "depmix/coupling.hpp"

namespace depmix {

struct DeltaEstimate {
    double value = 0.0;        // max over the time grid
    double stderr_delta = 0.0; // delta method at the maximizing t
    double stderr_boot = 0.0;  // nonparametric bootstrap
    double t_at_max = 0.0;
    std::int64_t replicas = 0;

    double stderr_value() const { return std::max(stderr_delta, stderr_boot); }
};

struct PhysdepPolicy {
    double p = 1.0;
    std::int64_t max_lag = 30;      // H
    std::int64_t replicas = 100000; // per (lag, t)
    std::vector<double> t_grid;     // empty selects the default grid
    std::uint64_t seed = 1;
    int bootstrap_resamples = 200;
    bool check_moment = true;
    std::int64_t extrapolation_lags = 10;
    Exec exec = Exec::Parallel;
};

enum class TailKind { Zero, Analytic, Extrapolated };

// Estimated dependence profile: delta_p per lag with errors, the order-1
// profile backing the tail sums, and Theta_k = sum_{h>=k} delta_1(h) with
// the tail beyond the horizon H supplied analytically or by a declared
// geometric extrapolation. The sup over t is realized as a max over t_grid
// and is therefore a lower bound; the grid is recorded.
struct DependenceProfile {
    double p = 1.0;
    std::int64_t max_lag = 0;
    std::vector<double> t_grid;
    std::vector<DeltaEstimate> delta;  // order p, lags 0..H
    std::vector<DeltaEstimate> delta1; // order 1, lags 0..H
    std::vector<double> theta;         // Theta_k, k = 0..H
    double tail_beyond_horizon = 0.0;  // sum_{h > H} delta_1(h)
    TailKind tail_kind = TailKind::Zero;
    std::uint64_t seed = 0;
    std::int64_t replicas = 0;

    double theta_at(std::int64_t k) const; // valid for 0 <= k <= H
    // Upper confidence evaluation: adds z standard errors of the summed terms.
    double theta_upper(std::int64_t k, double z) const;
};

// Plug-in estimate of delta_p(G, lag) = max over t_grid of
// E[|G(t,F_lag) - G(t,F_lag*)|^p]^{1/p}.
DeltaEstimate estimate_delta(const FilterSpec& filter, double p, std::int64_t lag,
                             std::int64_t replicas, std::span<const double> t_grid,
                             std::uint64_t seed, int bootstrap_resamples = 200,
                             Exec exec = Exec::Parallel);

DependenceProfile estimate_profile(const FilterSpec& filter, const PhysdepPolicy& policy);

// Theta tail lookup (profile must carry order-1 estimates).
double theta_tail(const DependenceProfile& profile, std::int64_t k);

// Geometric tail fit on the last fit_lags entries of an order-1 profile:
// returns sum_{h > horizon} of the fitted envelope. Refuses when the log
// profile is not geometric (R^2 < 0.9) or not decaying.
double geometric_tail_extrapolation(std::span<const double> delta1, std::int64_t horizon,
                                    std::int64_t fit_lags);

// Default grid: {0, .25, .5, .75, 1} for time-varying filters, {0.5} else.
std::vector<double> default_t_grid(const FilterSpec& filter);

void write_profile_csv(const DependenceProfile& profile, const std::filesystem::path& path);
void write_profile_json(const DependenceProfile& profile, const std::filesystem::path& path);

} // namespace depmix

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace depmix::stats {

// Mean in fixed index order (deterministic across schedules).
double mean(std::span<const double> x);

// Unbiased sample variance.
double variance(std::span<const double> x);

// Standard error of the sample mean.
double stderr_mean(std::span<const double> x);

struct LinearFit {
    double intercept = 0.0;
    double slope = 0.0;
    double r2 = 0.0;
};

LinearFit fit_line(std::span<const double> x, std::span<const double> y);

// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic(std::vector<double> a, std::vector<double> b);

// Critical value of the two-sample KS statistic at level 0.01.
double ks_critical_001(std::int64_t n, std::int64_t m);

double correlation(std::span<const double> x, std::span<const double> y);

// Nonparametric bootstrap of (mean x_i)^{1/p} over `resamples` draws with
// replacement; returns the standard deviation of the resampled statistic.
// Deterministic in (seed, stream).
double bootstrap_stderr_power_mean(std::span<const double> x, double inv_power,
                                   int resamples, std::uint64_t seed, std::uint64_t stream);

} // namespace depmix::stats

#include "depmix/stats.hpp"

#include <algorithm>
#include <cmath>

#include "depmix/errors.hpp"
#include "depmix/rng.hpp"

namespace depmix::stats {

double mean(std::span<const double> x) {
    if (x.empty()) {
        throw InvalidParameter("mean of empty sample");
    }
    double s = 0.0;
    for (double v : x) {
        s += v;
    }
    return s / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
    if (x.size() < 2) {
        return 0.0;
    }
    const double m = mean(x);
    double s = 0.0;
    for (double v : x) {
        s += (v - m) * (v - m);
    }
    return s / static_cast<double>(x.size() - 1);
}

double stderr_mean(std::span<const double> x) {
    if (x.empty()) {
        return 0.0;
    }
    return std::sqrt(variance(x) / static_cast<double>(x.size()));
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw InvalidParameter("fit_line: need two equally sized samples");
    }
    const double mx = mean(x);
    const double my = mean(y);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = (syy > 0.0) ? (sxy * sxy) / (sxx * syy) : 1.0;
    return f;
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) {
        throw InvalidParameter("ks_statistic: empty sample");
    }
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= v) ++i;
        while (j < b.size() && b[j] <= v) ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

double ks_critical_001(std::int64_t n, std::int64_t m) {
    // c(alpha) = sqrt(-ln(alpha/2)/2); c(0.01) = 1.62762.
    const double c = 1.6276236115189503;
    return c * std::sqrt(static_cast<double>(n + m) / (static_cast<double>(n) * static_cast<double>(m)));
}

double correlation(std::span<const double> x, std::span<const double> y) {
    const LinearFit f = fit_line(x, y);
    const double sign = f.slope < 0.0 ? -1.0 : 1.0;
    return sign * std::sqrt(std::max(0.0, f.r2));
}

double bootstrap_stderr_power_mean(std::span<const double> x, double inv_power,
                                   int resamples, std::uint64_t seed, std::uint64_t stream) {
    if (x.empty() || resamples <= 1) {
        return 0.0;
    }
    const std::uint64_t n = x.size();
    std::vector<double> stat(static_cast<std::size_t>(resamples));
    for (int b = 0; b < resamples; ++b) {
        double s = 0.0;
        for (std::uint64_t i = 0; i < n; ++i) {
            const std::uint64_t idx =
                rng::bits(seed, stream, (static_cast<std::uint64_t>(b) << 40) | i) % n;
            s += x[idx];
        }
        const double m = s / static_cast<double>(n);
        stat[static_cast<std::size_t>(b)] = (inv_power == 1.0) ? m : std::pow(m, inv_power);
    }
    double sd = std::sqrt(variance(stat));
    return sd;
}

} // namespace depmix::stats

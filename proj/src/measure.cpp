#include "depmix/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "depmix/errors.hpp"

namespace depmix {

namespace {

bool lex_less(const std::vector<double>& a, const std::vector<double>& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

} // namespace

EmpiricalMeasure EmpiricalMeasure::from_points(std::vector<std::vector<double>> points,
                                               std::vector<double> masses) {
    if (points.empty() || points.size() != masses.size()) {
        throw InvalidParameter("EmpiricalMeasure: need matching nonempty points and masses");
    }
    const std::size_t nu = points[0].size();
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i].size() != nu) {
            throw DimensionMismatch("EmpiricalMeasure: ragged support points");
        }
        if (masses[i] < 0.0) {
            throw InvalidParameter("EmpiricalMeasure: negative mass");
        }
        total += masses[i];
    }
    if (std::fabs(total - 1.0) > 1e-12) {
        throw InvalidParameter("EmpiricalMeasure: masses must sum to 1 within 1e-12");
    }

    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return lex_less(points[a], points[b]); });

    EmpiricalMeasure m;
    m.nu = static_cast<std::int64_t>(nu);
    for (std::size_t oi = 0; oi < order.size(); ++oi) {
        const auto& p = points[order[oi]];
        if (!m.points.empty() && m.points.back() == p) {
            m.masses.back() += masses[order[oi]];
        } else {
            m.points.push_back(p);
            m.masses.push_back(masses[order[oi]]);
        }
    }
    return m;
}

EmpiricalMeasure EmpiricalMeasure::from_samples(std::span<const double> data,
                                                std::int64_t replicas, std::int64_t nu) {
    if (replicas < 1 || nu < 1 ||
        data.size() != static_cast<std::size_t>(replicas) * static_cast<std::size_t>(nu)) {
        throw InvalidParameter("EmpiricalMeasure::from_samples: shape mismatch");
    }
    std::vector<std::vector<double>> pts(static_cast<std::size_t>(replicas));
    for (std::int64_t r = 0; r < replicas; ++r) {
        pts[static_cast<std::size_t>(r)].assign(
            data.begin() + r * nu, data.begin() + (r + 1) * nu);
    }
    std::vector<double> masses(static_cast<std::size_t>(replicas),
                               1.0 / static_cast<double>(replicas));
    return from_points(std::move(pts), std::move(masses));
}

double tv_distance(const EmpiricalMeasure& p, const EmpiricalMeasure& q) {
    if (p.nu != q.nu) {
        throw DimensionMismatch("tv_distance: dimension mismatch");
    }
    // Supports are sorted; walk the merged support.
    std::size_t i = 0, j = 0;
    double acc = 0.0;
    while (i < p.points.size() || j < q.points.size()) {
        if (j >= q.points.size() ||
            (i < p.points.size() && lex_less(p.points[i], q.points[j]))) {
            acc += p.masses[i];
            ++i;
        } else if (i >= p.points.size() || lex_less(q.points[j], p.points[i])) {
            acc += q.masses[j];
            ++j;
        } else {
            acc += std::fabs(p.masses[i] - q.masses[j]);
            ++i;
            ++j;
        }
    }
    return 0.5 * acc;
}

} // namespace depmix

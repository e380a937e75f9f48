#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace depmix {

// Weighted point masses on R^nu. Duplicate support points are merged at
// construction; masses are validated to sum to one within 1e-12.
struct EmpiricalMeasure {
    std::int64_t nu = 0;
    std::vector<std::vector<double>> points;
    std::vector<double> masses;

    static EmpiricalMeasure from_points(std::vector<std::vector<double>> points,
                                        std::vector<double> masses);

    // Rows of a replicas x nu matrix, each with mass 1/replicas.
    static EmpiricalMeasure from_samples(std::span<const double> data, std::int64_t replicas,
                                         std::int64_t nu);

    std::int64_t size() const { return static_cast<std::int64_t>(points.size()); }
};

// Total variation distance: half the l1 distance of the mass vectors over
// the merged support.
double tv_distance(const EmpiricalMeasure& p, const EmpiricalMeasure& q);

} // namespace depmix

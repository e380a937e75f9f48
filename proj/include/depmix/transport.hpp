#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "depmix/measure.hpp"

namespace depmix {

// Weighted l1 ground metric d(x,y) = sum_m w_m |x_m - y_m| with positive
// weights summing to at most 1.
struct WeightedMetric {
    std::vector<double> weights;

    static WeightedMetric geometric(std::int64_t nu); // w_m = 2^-m
    static WeightedMetric single(double w);

    void validate() const;
    double distance(std::span<const double> x, std::span<const double> y) const;
};

// Exact Wasserstein-1 distance in one dimension: w * integral |F_P - F_Q|.
double w1_exact_1d(const EmpiricalMeasure& p, const EmpiricalMeasure& q, double w);

struct TransportArc {
    std::int64_t from = 0; // index into P's support
    std::int64_t to = 0;   // index into Q's support
    double mass = 0.0;
};

struct TransportPlan {
    double value = 0.0;
    std::vector<TransportArc> arcs;
    bool subsampled = false;
    double subsample_stderr = 0.0; // spread across subsample repetitions
};

struct W1Options {
    std::int64_t max_support = 300; // per side; larger supports are subsampled
    int subsample_repeats = 20;
    std::uint64_t seed = 1;
};

// Optimal transport value under the weighted l1 cost, solved as min-cost
// flow on the bipartite support graph by successive shortest paths. The
// optimal coupling is returned for audit when no subsampling occurred.
TransportPlan w1_lp(const EmpiricalMeasure& p, const EmpiricalMeasure& q,
                    const WeightedMetric& metric, const W1Options& options = {});

struct DualityReport {
    double primal = 0.0;
    double best_dual = 0.0;
    double gap = 0.0; // primal - best_dual, nonnegative up to 1e-9
    int probes = 0;
};

// Kantorovich-Rubinstein lower bound from a family of 1-Lipschitz probes:
// signed weighted coordinate maps, min-distance functions to random anchor
// sets, and (1-D) the CDF sign potential, which attains the primal. The LP
// itself is the optimality certificate; this is a diagnostic.
DualityReport kr_duality_gap(const EmpiricalMeasure& p, const EmpiricalMeasure& q,
                             const WeightedMetric& metric, int probe_count,
                             std::uint64_t seed);

void write_coupling_csv(const TransportPlan& plan, const std::filesystem::path& path);

} // namespace depmix

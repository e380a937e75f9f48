#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "depmix/densities.hpp"
#include "depmix/filters.hpp"
#include "depmix/transport.hpp"

namespace depmix {

// The standard bump c * exp(-1/(1-x^2)) on (-1,1). The normalization and the
// derivative/first-moment constants are computed once by adaptive quadrature
// and cached; tests pin them against independently computed references.
struct MollifierKernel {
    double normalization = 0.0; // c
    double c_phi_1 = 0.0;       // integral of |phi'|
    double c_phi_2 = 0.0;       // integral of |x| phi(x)
    double quad_tol = 1e-12;

    double phi(double x) const;  // normalized bump
    double dphi(double x) const;

    static const MollifierKernel& standard();
};

struct Axis {
    double lo = 0.0;
    double step = 1.0;
    std::int64_t count = 0;
};

// Density sampled on a uniform product grid, nu <= 3.
struct GriddedDensity {
    std::vector<Axis> axes;
    std::vector<double> values; // row-major over axes

    std::int64_t nu() const { return static_cast<std::int64_t>(axes.size()); }
    double cell_volume() const;
    double mass() const;

    static GriddedDensity sample(const DensitySpec& f, std::int64_t nodes_per_dim = 0);
};

// Convolution with the product mollifier, one separable pass per dimension.
// The grid is extended by the kernel half-width on each side so mass is
// preserved exactly (sampled kernel normalized to unit sum). Refuses grids
// with fewer than 3 steps per bandwidth.
GriddedDensity mollify_density(const GriddedDensity& f, double eps, const WeightedMetric& metric);
GriddedDensity mollify_density(const DensitySpec& f, double eps, const WeightedMetric& metric,
                               std::int64_t nodes_per_dim = 0);

// L1 distance between two gridded densities on identical axes.
double grid_l1_distance(const GriddedDensity& a, const GriddedDensity& b);

// Pointwise mollified value of a 1-D component at bandwidth bw (direct
// kernel quadrature; used by the high-accuracy checks).
double mollified_value_1d(const Component1D& f, double bw, double x);

struct CheckRow {
    double eps = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0; // lhs / rhs
};

// Smoothing error against C_{phi,2} eps sum_m w_m ||d_m f||_1.
struct SmoothingReport {
    double weighted_derivative_norm = 0.0;
    std::vector<CheckRow> rows;
    bool all_hold(double tol = 1e-6) const;
};

SmoothingReport smoothing_error_check(const DensitySpec& f, std::span<const double> eps_grid,
                                      const WeightedMetric& metric);

// Mollified difference against (C_{phi,1}/eps) W_1(P,Q); W_1 computed
// coordinatewise (exact for the product densities handled here).
struct DifferenceReport {
    double w1 = 0.0;
    std::vector<CheckRow> rows;
    bool all_hold(double tol = 1e-6) const;
};

DifferenceReport mollified_difference_check(const DensitySpec& p, const DensitySpec& q,
                                            std::span<const double> eps_grid,
                                            const WeightedMetric& metric);

// Interpolation ||p - q||_1^2 <= 8 C_{phi,1} C_{phi,2} D W_1(P,Q), with the
// optimizing bandwidth eps* = sqrt(C_{phi,1} W / (2 D C_{phi,2})).
struct InterpolationResult {
    double c_explicit = 0.0;
    double d_const = 0.0;
    double w1 = 0.0;
    double bound = 0.0;
    double eps_opt = 0.0;
    double lhs_l1 = 0.0; // measured ||p - q||_1
    bool holds = false;

    // The eps-dependent bound 2 C_{phi,2} eps D + C_{phi,1} W / eps whose
    // minimum over eps produces `bound` after squaring.
    double bound_curve(double eps) const;
};

InterpolationResult interpolation_bound(const DensitySpec& p, const DensitySpec& q,
                                        const WeightedMetric& metric, double d_const);

// Assumption-type derivative functionals for Gaussian blocks. d1 uses the
// marginal precision of the future block, d2 the precision of the
// conditional (Schur complement) given the past block; both reduce to
// sum_m w_m sqrt(2 (Sigma^-1)_mm / pi).
struct GaussianD {
    double d1 = 0.0;
    double d2 = 0.0;
    double d = 0.0; // max(d1, d2)
    std::vector<double> marginal_prec_diag;
    std::vector<double> conditional_prec_diag;
};

GaussianD gaussian_D(std::span<const double> joint_cov, std::int64_t dim,
                     std::int64_t past_dim, const WeightedMetric& metric);

// Covariance matrix of (X_{i,n}) at the given series indices for a linear
// filter with Gaussian innovations.
std::vector<double> linear_filter_covariance(const FilterSpec& filter, std::int64_t n,
                                             std::span<const std::int64_t> indices);

// Closed-form d1 for a stationary AR(1) block with unit innovation variance
// (tridiagonal precision: ends 1, interior 1 + rho^2).
double ar1_marginal_d1(double rho, std::int64_t nu, const WeightedMetric& metric);

} // namespace depmix

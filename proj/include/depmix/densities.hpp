#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace depmix {

// One-dimensional density with analytic pdf, derivative and cdf.
struct Component1D {
    enum class Kind { Gaussian, Laplace, Mixture };

    struct MixPart {
        double weight = 1.0;
        double mean = 0.0;
        double sd = 1.0;
    };

    Kind kind = Kind::Gaussian;
    double mean = 0.0;
    double sd = 1.0; // Gaussian
    double scale = 1.0; // Laplace
    std::vector<MixPart> parts; // Mixture (weights sum to 1)

    static Component1D gaussian(double mean, double sd);
    static Component1D laplace(double mean, double scale);
    static Component1D mixture(std::vector<MixPart> parts);

    double pdf(double x) const;
    double dpdf(double x) const;
    double cdf(double x) const;

    // L1 norm of the derivative, closed form for Gaussian (2 f(mode)) and
    // Laplace (1/scale); quadrature for mixtures.
    double l1_dpdf() const;

    // Interval holding all but tail_mass of the probability.
    std::pair<double, double> range(double tail_mass) const;
};

// Product density on R^nu, nu <= 3. The product structure keeps weighted
// derivative norms and mollifications coordinatewise.
struct DensitySpec {
    std::vector<Component1D> comps;
    std::int64_t grid_nodes = 0;   // 0 selects per-dimension defaults
    double tail_mass = 1e-9;

    static DensitySpec gaussian1d(double mean, double sd);
    static DensitySpec laplace1d(double mean, double scale);
    static DensitySpec mixture1d(std::vector<Component1D::MixPart> parts);
    static DensitySpec product(std::vector<Component1D> comps);

    std::int64_t nu() const { return static_cast<std::int64_t>(comps.size()); }
    void validate() const;
    std::int64_t default_nodes() const;
};

// Exact 1-D Wasserstein-1 between densities: w * integral |F_p - F_q|.
double w1_density_1d(const Component1D& p, const Component1D& q, double w);

} // namespace depmix

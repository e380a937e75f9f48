#include <doctest.h>

#include <cmath>
#include <vector>

#include "depmix/errors.hpp"
#include "depmix/mollify.hpp"
#include "depmix/quadrature.hpp"

using namespace depmix;

namespace {

// Reference values computed independently at 30 digits (mpmath).
constexpr double kNormalization = 2.25228362104358101;
constexpr double kCphi1 = 1.65713767973821030;
constexpr double kCphi2 = 0.33445399770997533;
constexpr double kSqrt2OverPi = 0.79788456080286536;

} // namespace

TEST_SUITE("mollify") {

TEST_CASE("kernel constants match the frozen quadrature references") {
    const MollifierKernel& k = MollifierKernel::standard();
    CHECK(k.normalization == doctest::Approx(kNormalization).epsilon(1e-10));
    CHECK(k.c_phi_1 == doctest::Approx(kCphi1).epsilon(1e-10));
    CHECK(k.c_phi_2 == doctest::Approx(kCphi2).epsilon(1e-10));
    // Unimodal symmetric bump: total variation is twice the mode.
    CHECK(k.c_phi_1 == doctest::Approx(2.0 * k.phi(0.0)).epsilon(1e-12));
    // Unit mass and symmetry.
    const double mass = quadrature::adaptive_simpson(
        [&](double x) { return k.phi(x); }, -1.0, 1.0, 1e-12);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(k.phi(0.37) == doctest::Approx(k.phi(-0.37)).epsilon(1e-15));
    CHECK(k.phi(1.0) == 0.0);
    CHECK(k.phi(1.5) == 0.0);
}

TEST_CASE("scaled kernel derivative identity") {
    // ||d_m Phi_eps^(w)||_1 = C_phi_1 / (eps w_m), per coordinate.
    const MollifierKernel& k = MollifierKernel::standard();
    for (const double bw : {0.1, 0.35}) {
        const double norm = quadrature::adaptive_simpson(
            [&](double x) { return std::fabs(k.dphi(x / bw)) / (bw * bw); }, -bw, bw, 1e-12);
        CHECK(norm == doctest::Approx(kCphi1 / bw).epsilon(1e-8));
    }
}

TEST_CASE("component derivative norms") {
    CHECK(Component1D::gaussian(0.0, 1.0).l1_dpdf() ==
          doctest::Approx(kSqrt2OverPi).epsilon(1e-10));
    CHECK(Component1D::gaussian(2.0, 0.5).l1_dpdf() ==
          doctest::Approx(kSqrt2OverPi / 0.5).epsilon(1e-10));
    CHECK(Component1D::laplace(0.0, 0.7).l1_dpdf() == doctest::Approx(1.0 / 0.7).epsilon(1e-12));
    // Mixture norm against direct quadrature.
    const auto mix = Component1D::mixture({{0.4, -1.0, 0.6}, {0.6, 1.2, 0.9}});
    const double direct = quadrature::adaptive_simpson(
        [&](double x) { return std::fabs(mix.dpdf(x)); }, -12.0, -1.0, 1e-12) +
        quadrature::adaptive_simpson(
            [&](double x) { return std::fabs(mix.dpdf(x)); }, -1.0, 1.2, 1e-12) +
        quadrature::adaptive_simpson(
            [&](double x) { return std::fabs(mix.dpdf(x)); }, 1.2, 14.0, 1e-12);
    CHECK(mix.l1_dpdf() == doctest::Approx(direct).epsilon(1e-8));
}

TEST_CASE("gridded mollification preserves mass and symmetry") {
    const DensitySpec f = DensitySpec::gaussian1d(0.0, 1.0);
    const WeightedMetric m = WeightedMetric::single(1.0);
    const GriddedDensity base = GriddedDensity::sample(f);
    CHECK(base.mass() == doctest::Approx(1.0).epsilon(1e-8));
    for (const double eps : {0.05, 0.2}) {
        const GriddedDensity smoothed = mollify_density(base, eps, m);
        CHECK(smoothed.mass() == doctest::Approx(base.mass()).epsilon(1e-10));
        // Symmetric input stays symmetric.
        const std::size_t n = smoothed.values.size();
        for (std::size_t i = 0; i < n / 2; i += 97) {
            CHECK(smoothed.values[i] == doctest::Approx(smoothed.values[n - 1 - i]).epsilon(1e-9));
        }
    }
}

TEST_CASE("two-dimensional gridded mollification preserves mass") {
    const DensitySpec f =
        DensitySpec::product({Component1D::gaussian(0.0, 1.0), Component1D::gaussian(0.0, 1.0)});
    WeightedMetric m;
    m.weights = {0.5, 0.25};
    GriddedDensity base = GriddedDensity::sample(f, 801);
    const GriddedDensity smoothed = mollify_density(base, 0.3, m);
    CHECK(smoothed.mass() == doctest::Approx(base.mass()).epsilon(1e-10));
}

TEST_CASE("grids refusing too-coarse bandwidths") {
    const DensitySpec f = DensitySpec::gaussian1d(0.0, 1.0);
    const WeightedMetric m = WeightedMetric::single(1.0);
    const GriddedDensity base = GriddedDensity::sample(f, 101); // step ~ 0.18
    CHECK_THROWS_AS((void)mollify_density(base, 0.1, m), GridTooCoarse);
}

TEST_CASE("gridded convolution agrees with direct kernel quadrature") {
    const DensitySpec f = DensitySpec::gaussian1d(0.3, 0.8);
    const WeightedMetric m = WeightedMetric::single(1.0);
    const double eps = 0.25;
    const GriddedDensity g = mollify_density(f, eps, m);
    const Axis ax = g.axes[0];
    for (std::int64_t i = ax.count / 4; i < ax.count; i += ax.count / 3) {
        const double x = ax.lo + ax.step * static_cast<double>(i);
        const double direct = mollified_value_1d(f.comps[0], eps, x);
        CHECK(g.values[static_cast<std::size_t>(i)] == doctest::Approx(direct).epsilon(5e-4));
    }
}

TEST_CASE("smoothing error bound holds over the eps grid") {
    const std::vector<double> eps_grid{0.02, 0.05, 0.1, 0.2, 0.5};
    const WeightedMetric w1 = WeightedMetric::single(1.0);
    WeightedMetric w2;
    w2.weights = {0.5, 0.25};

    for (const auto& f : {DensitySpec::gaussian1d(0.0, 1.0), DensitySpec::laplace1d(0.0, 1.0)}) {
        const SmoothingReport rep = smoothing_error_check(f, eps_grid, w1);
        CHECK(rep.all_hold());
        for (const auto& row : rep.rows) {
            CHECK(row.lhs >= 0.0);
            CHECK(row.ratio <= 1.0 + 1e-6);
        }
    }
    const DensitySpec g2 =
        DensitySpec::product({Component1D::gaussian(0.0, 1.0), Component1D::gaussian(0.0, 1.0)});
    const SmoothingReport rep2 = smoothing_error_check(g2, eps_grid, w2);
    CHECK(rep2.all_hold());
    CHECK(rep2.weighted_derivative_norm == doctest::Approx(0.75 * kSqrt2OverPi).epsilon(1e-9));
}

TEST_CASE("smoothing error vanishes at least linearly in eps") {
    const DensitySpec f = DensitySpec::gaussian1d(0.0, 1.0);
    const WeightedMetric w = WeightedMetric::single(1.0);
    const std::vector<double> eps_grid{0.2, 0.1, 0.05};
    const SmoothingReport rep = smoothing_error_check(f, eps_grid, w);
    // Symmetric kernels contract faster than the first-order bound; halving
    // eps must shrink the measured error by at least (almost) half.
    CHECK(rep.rows[0].lhs / rep.rows[1].lhs >= 1.8);
    CHECK(rep.rows[1].lhs / rep.rows[2].lhs >= 1.8);
}

TEST_CASE("mollified difference bound and gaussian shift w1") {
    const std::vector<double> eps_grid{0.02, 0.05, 0.1, 0.2, 0.5};
    const WeightedMetric w = WeightedMetric::single(1.0);
    const DensitySpec p = DensitySpec::gaussian1d(0.0, 1.0);
    const DensitySpec q = DensitySpec::gaussian1d(0.5, 1.0);
    const DifferenceReport rep = mollified_difference_check(p, q, eps_grid, w);
    CHECK(rep.w1 == doctest::Approx(0.5).epsilon(1e-9)); // mean shift
    CHECK(rep.all_hold());
    // The mollified difference falls far slower than the 1/eps bound grows,
    // so the ratio rises monotonically toward tightness as eps increases.
    for (std::size_t i = 1; i < rep.rows.size(); ++i) {
        CHECK(rep.rows[i].ratio >= rep.rows[i - 1].ratio - 1e-9);
        CHECK(rep.rows[i].lhs <= rep.rows[i - 1].lhs + 1e-9);
    }
    const DifferenceReport same = mollified_difference_check(p, p, eps_grid, w);
    CHECK(same.w1 == doctest::Approx(0.0).epsilon(1e-12));
    for (const auto& row : same.rows) {
        CHECK(row.lhs <= 1e-10);
    }
}

TEST_CASE("interpolation bound with the explicit constant") {
    const WeightedMetric w = WeightedMetric::single(1.0);
    const DensitySpec p = DensitySpec::gaussian1d(0.0, 1.0);
    const MollifierKernel& k = MollifierKernel::standard();
    CHECK(8.0 * k.c_phi_1 * k.c_phi_2 == doctest::Approx(4.4338905739542178).epsilon(1e-9));

    for (const double mu : {0.1, 0.2, 0.5}) {
        const DensitySpec q = DensitySpec::gaussian1d(mu, 1.0);
        const InterpolationResult res = interpolation_bound(p, q, w, kSqrt2OverPi);
        CHECK(res.holds);
        CHECK(res.w1 == doctest::Approx(mu).epsilon(1e-9));
        // Scheffe: ||p-q||_1 = 2 (2 Phi(mu/2) - 1) for a pure mean shift.
        const double scheffe = 2.0 * (2.0 * rng::phi_cdf(mu / 2.0) - 1.0);
        CHECK(res.lhs_l1 == doctest::Approx(scheffe).epsilon(1e-6));
        // The closed-form bandwidth beats its +-25% neighbours.
        CHECK(res.bound_curve(res.eps_opt) < res.bound_curve(0.75 * res.eps_opt));
        CHECK(res.bound_curve(res.eps_opt) < res.bound_curve(1.25 * res.eps_opt));
        // And the minimized curve squares to the explicit bound.
        const double curve_min = res.bound_curve(res.eps_opt);
        CHECK(curve_min * curve_min == doctest::Approx(res.bound).epsilon(1e-9));
    }
    // Equal densities: zero distance, zero bound, trivially holds.
    const InterpolationResult same = interpolation_bound(p, p, w, kSqrt2OverPi);
    CHECK(same.w1 == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(same.bound == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(same.lhs_l1 <= 1e-8);
    CHECK(same.holds);

    CHECK_THROWS_AS((void)interpolation_bound(p, p, w, 0.0), InvalidParameter);
}

TEST_CASE("gaussian D functionals") {
    const WeightedMetric w1m = WeightedMetric::single(1.0);
    // nu = 1, unit variance: D1 = sqrt(2/pi).
    const std::vector<double> cov1{1.0};
    const GaussianD d1 = gaussian_D(cov1, 1, 0, w1m);
    CHECK(d1.d1 == doctest::Approx(kSqrt2OverPi).epsilon(1e-12));
    CHECK(d1.d2 == d1.d1);

    // Independent past and future: conditioning changes nothing.
    WeightedMetric w2 = WeightedMetric::geometric(1);
    const std::vector<double> cov2{2.0, 0.0, 0.0, 1.5};
    const GaussianD d2 = gaussian_D(cov2, 2, 1, w2);
    CHECK(d2.d1 == doctest::Approx(d2.d2).epsilon(1e-12));

    // Correlated case: conditioning shrinks variance, raising D2 above D1.
    const std::vector<double> cov3{1.0, 0.6, 0.6, 1.0};
    const GaussianD d3 = gaussian_D(cov3, 2, 1, w2);
    CHECK(d3.d2 > d3.d1);
    CHECK(d3.d == d3.d2);
}

TEST_CASE("ar1 closed-form D1 matches the matrix route") {
    const double rho = 0.6;
    const std::int64_t nu = 8;
    const WeightedMetric w = WeightedMetric::geometric(nu);
    // Stationary AR(1) covariance block, unit innovation variance.
    std::vector<double> cov(static_cast<std::size_t>(nu * nu));
    for (std::int64_t i = 0; i < nu; ++i) {
        for (std::int64_t j = 0; j < nu; ++j) {
            cov[static_cast<std::size_t>(i * nu + j)] =
                std::pow(rho, std::fabs(static_cast<double>(i - j))) / (1.0 - rho * rho);
        }
    }
    const GaussianD d = gaussian_D(cov, nu, 0, w);
    CHECK(d.d1 == doctest::Approx(ar1_marginal_d1(rho, nu, w)).epsilon(1e-10));
    for (std::int64_t m = 1; m + 1 < nu; ++m) {
        CHECK(d.marginal_prec_diag[static_cast<std::size_t>(m)] ==
              doctest::Approx(1.0 + rho * rho).epsilon(1e-10));
    }
    CHECK(d.marginal_prec_diag[0] == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("gaussian D matches direct quadrature in one and two dimensions") {
    // nu = 1: || p' ||_1 by quadrature equals sqrt(2/pi).
    const auto g = Component1D::gaussian(0.0, 1.0);
    const double direct1 = quadrature::adaptive_simpson(
                               [&](double x) { return std::fabs(g.dpdf(x)); }, -14.0, 0.0,
                               1e-12) +
                           quadrature::adaptive_simpson(
                               [&](double x) { return std::fabs(g.dpdf(x)); }, 0.0, 14.0, 1e-12);
    CHECK(direct1 == doctest::Approx(kSqrt2OverPi).epsilon(1e-6));

    // nu = 2 correlated Gaussian: || d_1 p ||_1 = E|(Sigma^-1 X)_1| by 2-D
    // quadrature vs the closed form sqrt(2 (Sigma^-1)_11 / pi).
    const double r = 0.5;
    const std::vector<double> cov{1.0, r, r, 1.0};
    WeightedMetric w;
    w.weights = {0.5, 0.25};
    const GaussianD d = gaussian_D(cov, 2, 0, w);
    const double det = 1.0 - r * r;
    auto pdf2 = [&](double x, double y) {
        const double quad = (x * x - 2.0 * r * x * y + y * y) / det;
        return std::exp(-0.5 * quad) / (2.0 * 3.14159265358979323846 * std::sqrt(det));
    };
    auto dp1 = [&](double x, double y) {
        const double s1 = (x - r * y) / det; // (Sigma^-1 v)_1
        return std::fabs(-s1 * pdf2(x, y));
    };
    const double direct = quadrature::adaptive_simpson(
        [&](double x) {
            return quadrature::adaptive_simpson([&](double y) { return dp1(x, y); }, -9.0, 9.0,
                                                1e-10);
        },
        -9.0, 9.0, 1e-8);
    const double closed = std::sqrt(2.0 * d.marginal_prec_diag[0] / 3.14159265358979323846);
    CHECK(direct == doctest::Approx(closed).epsilon(1e-6));
}

TEST_CASE("filter covariance matches the AR(1) closed form") {
    FilterSpec f = FilterSpec::tv_ar1({0.6, 0.0}, InnovationLaw::gaussian(0.0, 1.0));
    f.centered = true;
    const std::vector<std::int64_t> idx{10, 11, 13};
    const std::vector<double> cov = linear_filter_covariance(f, 64, idx);
    const double v = 1.0 / (1.0 - 0.36);
    CHECK(cov[0] == doctest::Approx(v).epsilon(1e-9));
    CHECK(cov[1] == doctest::Approx(v * 0.6).epsilon(1e-9));
    CHECK(cov[2] == doctest::Approx(v * std::pow(0.6, 3)).epsilon(1e-9));
    CHECK(cov[4] == doctest::Approx(v).epsilon(1e-9));

    const FilterSpec bad = FilterSpec::linear_geometric(0.5, InnovationLaw::bernoulli(0.5));
    CHECK_THROWS_AS((void)linear_filter_covariance(bad, 64, idx), InvalidParameter);
}

} // TEST_SUITE

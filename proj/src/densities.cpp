#include "depmix/densities.hpp"

#include <algorithm>
#include <cmath>

#include "depmix/errors.hpp"
#include "depmix/quadrature.hpp"
#include "depmix/rng.hpp"

namespace depmix {

namespace {

constexpr double kSqrt2Pi = 2.5066282746310005;

double gauss_pdf(double x, double mean, double sd) {
    const double z = (x - mean) / sd;
    return std::exp(-0.5 * z * z) / (sd * kSqrt2Pi);
}

double gauss_dpdf(double x, double mean, double sd) {
    const double z = (x - mean) / sd;
    return -z / sd * gauss_pdf(x, mean, sd);
}

} // namespace

Component1D Component1D::gaussian(double mean, double sd) {
    if (!(sd > 0.0)) {
        throw InvalidParameter("gaussian component: sd must be positive");
    }
    Component1D c;
    c.kind = Kind::Gaussian;
    c.mean = mean;
    c.sd = sd;
    return c;
}

Component1D Component1D::laplace(double mean, double scale) {
    if (!(scale > 0.0)) {
        throw InvalidParameter("laplace component: scale must be positive");
    }
    Component1D c;
    c.kind = Kind::Laplace;
    c.mean = mean;
    c.scale = scale;
    return c;
}

Component1D Component1D::mixture(std::vector<MixPart> parts) {
    if (parts.empty()) {
        throw InvalidParameter("mixture component: need at least one part");
    }
    double total = 0.0;
    for (const auto& p : parts) {
        if (!(p.weight > 0.0) || !(p.sd > 0.0)) {
            throw InvalidParameter("mixture component: weights and sds must be positive");
        }
        total += p.weight;
    }
    if (std::fabs(total - 1.0) > 1e-12) {
        throw InvalidParameter("mixture component: weights must sum to 1");
    }
    Component1D c;
    c.kind = Kind::Mixture;
    c.parts = std::move(parts);
    return c;
}

double Component1D::pdf(double x) const {
    switch (kind) {
    case Kind::Gaussian:
        return gauss_pdf(x, mean, sd);
    case Kind::Laplace:
        return std::exp(-std::fabs(x - mean) / scale) / (2.0 * scale);
    case Kind::Mixture: {
        double s = 0.0;
        for (const auto& p : parts) {
            s += p.weight * gauss_pdf(x, p.mean, p.sd);
        }
        return s;
    }
    }
    return 0.0;
}

double Component1D::dpdf(double x) const {
    switch (kind) {
    case Kind::Gaussian:
        return gauss_dpdf(x, mean, sd);
    case Kind::Laplace: {
        const double sign = x >= mean ? -1.0 : 1.0;
        return sign * pdf(x) / scale;
    }
    case Kind::Mixture: {
        double s = 0.0;
        for (const auto& p : parts) {
            s += p.weight * gauss_dpdf(x, p.mean, p.sd);
        }
        return s;
    }
    }
    return 0.0;
}

double Component1D::cdf(double x) const {
    switch (kind) {
    case Kind::Gaussian:
        return rng::phi_cdf((x - mean) / sd);
    case Kind::Laplace:
        if (x < mean) {
            return 0.5 * std::exp((x - mean) / scale);
        }
        return 1.0 - 0.5 * std::exp(-(x - mean) / scale);
    case Kind::Mixture: {
        double s = 0.0;
        for (const auto& p : parts) {
            s += p.weight * rng::phi_cdf((x - p.mean) / p.sd);
        }
        return s;
    }
    }
    return 0.0;
}

double Component1D::l1_dpdf() const {
    switch (kind) {
    case Kind::Gaussian:
        return 2.0 * pdf(mean); // = sqrt(2/pi)/sd
    case Kind::Laplace:
        return 1.0 / scale;
    case Kind::Mixture: {
        // |f'| has kinks at the sign changes; split the range at the
        // component means and integrate adaptively.
        const auto [lo, hi] = range(1e-12);
        std::vector<double> cuts{lo, hi};
        for (const auto& p : parts) {
            cuts.push_back(p.mean);
        }
        std::sort(cuts.begin(), cuts.end());
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            acc += quadrature::adaptive_simpson(
                [this](double x) { return std::fabs(dpdf(x)); }, cuts[i], cuts[i + 1], 1e-12);
        }
        return acc;
    }
    }
    return 0.0;
}

std::pair<double, double> Component1D::range(double tail_mass) const {
    switch (kind) {
    case Kind::Gaussian: {
        const double z = std::sqrt(-2.0 * std::log(std::max(tail_mass, 1e-300)));
        return {mean - (z + 1.0) * sd, mean + (z + 1.0) * sd};
    }
    case Kind::Laplace: {
        const double t = scale * std::log(2.0 / std::max(tail_mass, 1e-300));
        return {mean - t, mean + t};
    }
    case Kind::Mixture: {
        double lo = 0.0, hi = 0.0;
        bool first = true;
        for (const auto& p : parts) {
            const double z = std::sqrt(-2.0 * std::log(std::max(tail_mass, 1e-300)));
            const double l = p.mean - (z + 1.0) * p.sd;
            const double h = p.mean + (z + 1.0) * p.sd;
            if (first) {
                lo = l;
                hi = h;
                first = false;
            } else {
                lo = std::min(lo, l);
                hi = std::max(hi, h);
            }
        }
        return {lo, hi};
    }
    }
    return {0.0, 0.0};
}

DensitySpec DensitySpec::gaussian1d(double mean, double sd) {
    return product({Component1D::gaussian(mean, sd)});
}

DensitySpec DensitySpec::laplace1d(double mean, double scale) {
    return product({Component1D::laplace(mean, scale)});
}

DensitySpec DensitySpec::mixture1d(std::vector<Component1D::MixPart> parts) {
    return product({Component1D::mixture(std::move(parts))});
}

DensitySpec DensitySpec::product(std::vector<Component1D> comps) {
    DensitySpec d;
    d.comps = std::move(comps);
    d.validate();
    return d;
}

void DensitySpec::validate() const {
    if (comps.empty() || comps.size() > 3) {
        throw InvalidParameter("DensitySpec: dimension must be 1..3");
    }
}

std::int64_t DensitySpec::default_nodes() const {
    if (grid_nodes > 0) {
        return grid_nodes;
    }
    switch (comps.size()) {
    case 1:
        return 4001;
    case 2:
        return 1201;
    default:
        return 301;
    }
}

double w1_density_1d(const Component1D& p, const Component1D& q, double w) {
    const auto [plo, phi] = p.range(1e-13);
    const auto [qlo, qhi] = q.range(1e-13);
    const double lo = std::min(plo, qlo);
    const double hi = std::max(phi, qhi);
    const double v = quadrature::adaptive_simpson(
        [&](double x) { return std::fabs(p.cdf(x) - q.cdf(x)); }, lo, hi, 1e-12);
    return w * v;
}

} // namespace depmix

#include "depmix/mollify.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "depmix/errors.hpp"
#include "depmix/quadrature.hpp"

namespace depmix {

namespace {

double raw_bump(double x) {
    const double s = 1.0 - x * x;
    return s > 0.0 ? std::exp(-1.0 / s) : 0.0;
}

constexpr std::int64_t kKernelQuadIntervals = 128;

} // namespace

double MollifierKernel::phi(double x) const {
    return normalization * raw_bump(x);
}

double MollifierKernel::dphi(double x) const {
    const double s = 1.0 - x * x;
    if (s <= 0.0) {
        return 0.0;
    }
    return normalization * raw_bump(x) * (-2.0 * x / (s * s));
}

const MollifierKernel& MollifierKernel::standard() {
    static const MollifierKernel kernel = [] {
        MollifierKernel k;
        const double integral =
            quadrature::adaptive_simpson([](double x) { return raw_bump(x); }, -1.0, 1.0, 1e-14);
        k.normalization = 1.0 / integral;
        // phi is unimodal and symmetric, so the total variation is twice the
        // mode; still computed by quadrature and checked against 2 phi(0) in
        // the tests.
        k.c_phi_1 = quadrature::adaptive_simpson(
                        [&k](double x) { return std::fabs(k.dphi(x)); }, -1.0, 0.0, 1e-14) +
                    quadrature::adaptive_simpson(
                        [&k](double x) { return std::fabs(k.dphi(x)); }, 0.0, 1.0, 1e-14);
        k.c_phi_2 = 2.0 * quadrature::adaptive_simpson(
                              [&k](double x) { return x * k.phi(x); }, 0.0, 1.0, 1e-14);
        return k;
    }();
    return kernel;
}

double GriddedDensity::cell_volume() const {
    double v = 1.0;
    for (const auto& a : axes) {
        v *= a.step;
    }
    return v;
}

double GriddedDensity::mass() const {
    double s = 0.0;
    for (double v : values) {
        s += v;
    }
    return s * cell_volume();
}

GriddedDensity GriddedDensity::sample(const DensitySpec& f, std::int64_t nodes_per_dim) {
    f.validate();
    const std::int64_t nodes = nodes_per_dim > 0 ? nodes_per_dim : f.default_nodes();
    GriddedDensity g;
    std::vector<std::vector<double>> axis_values;
    for (const auto& comp : f.comps) {
        const auto [lo, hi] = comp.range(f.tail_mass);
        Axis ax;
        ax.lo = lo;
        ax.count = nodes;
        ax.step = (hi - lo) / static_cast<double>(nodes - 1);
        g.axes.push_back(ax);
        std::vector<double> vals(static_cast<std::size_t>(nodes));
        for (std::int64_t i = 0; i < nodes; ++i) {
            vals[static_cast<std::size_t>(i)] = comp.pdf(ax.lo + ax.step * static_cast<double>(i));
        }
        axis_values.push_back(std::move(vals));
    }
    std::int64_t total = 1;
    for (const auto& a : g.axes) {
        total *= a.count;
    }
    g.values.resize(static_cast<std::size_t>(total));
    for (std::int64_t idx = 0; idx < total; ++idx) {
        std::int64_t rest = idx;
        double v = 1.0;
        for (std::int64_t m = g.nu() - 1; m >= 0; --m) {
            const std::int64_t i = rest % g.axes[static_cast<std::size_t>(m)].count;
            rest /= g.axes[static_cast<std::size_t>(m)].count;
            v *= axis_values[static_cast<std::size_t>(m)][static_cast<std::size_t>(i)];
        }
        g.values[static_cast<std::size_t>(idx)] = v;
    }
    return g;
}

namespace {

// Kernel sampled on the grid step and normalized to unit sum: the discrete
// convolution then redistributes mass without loss onto the extended grid.
std::vector<double> sampled_kernel(const MollifierKernel& k, double bw, double step,
                                   std::int64_t half_width) {
    std::vector<double> w(static_cast<std::size_t>(2 * half_width + 1));
    double sum = 0.0;
    for (std::int64_t t = -half_width; t <= half_width; ++t) {
        const double x = static_cast<double>(t) * step / bw;
        const double v = k.phi(x);
        w[static_cast<std::size_t>(t + half_width)] = v;
        sum += v;
    }
    for (auto& v : w) {
        v /= sum;
    }
    return w;
}

} // namespace

GriddedDensity mollify_density(const GriddedDensity& f, double eps, const WeightedMetric& metric) {
    if (!(eps > 0.0)) {
        throw InvalidParameter("mollify_density: eps must be positive");
    }
    if (f.nu() < 1 || f.nu() > 3) {
        throw InvalidParameter("mollify_density: gridded convolution supports nu <= 3");
    }
    metric.validate();
    if (static_cast<std::int64_t>(metric.weights.size()) < f.nu()) {
        throw DimensionMismatch("mollify_density: metric has fewer weights than dimensions");
    }
    const MollifierKernel& kernel = MollifierKernel::standard();

    GriddedDensity out = f;
    for (std::int64_t m = 0; m < f.nu(); ++m) {
        const double bw = eps * metric.weights[static_cast<std::size_t>(m)];
        const Axis ax = out.axes[static_cast<std::size_t>(m)];
        if (bw / ax.step < 3.0) {
            throw GridTooCoarse("mollify_density: bandwidth " + std::to_string(bw) +
                                " under 3 grid steps of " + std::to_string(ax.step));
        }
        const std::int64_t hw = static_cast<std::int64_t>(std::ceil(bw / ax.step));
        const std::vector<double> kw = sampled_kernel(kernel, bw, ax.step, hw);

        Axis nax;
        nax.step = ax.step;
        nax.lo = ax.lo - static_cast<double>(hw) * ax.step;
        nax.count = ax.count + 2 * hw;

        // Row-major layout: stride of dimension m given current axes.
        std::vector<Axis> new_axes = out.axes;
        new_axes[static_cast<std::size_t>(m)] = nax;
        std::int64_t total_new = 1;
        for (const auto& a : new_axes) {
            total_new *= a.count;
        }
        std::vector<double> nv(static_cast<std::size_t>(total_new), 0.0);

        std::int64_t inner = 1;
        for (std::int64_t d = m + 1; d < out.nu(); ++d) {
            inner *= out.axes[static_cast<std::size_t>(d)].count;
        }
        std::int64_t outer = 1;
        for (std::int64_t d = 0; d < m; ++d) {
            outer *= out.axes[static_cast<std::size_t>(d)].count;
        }
        for (std::int64_t o = 0; o < outer; ++o) {
            for (std::int64_t i = 0; i < inner; ++i) {
                const double* src = &out.values[static_cast<std::size_t>(o * ax.count * inner + i)];
                double* dst = &nv[static_cast<std::size_t>(o * nax.count * inner + i)];
                for (std::int64_t x = 0; x < ax.count; ++x) {
                    const double fx = src[x * inner];
                    if (fx == 0.0) {
                        continue;
                    }
                    for (std::int64_t t = 0; t < 2 * hw + 1; ++t) {
                        dst[(x + t) * inner] += fx * kw[static_cast<std::size_t>(t)];
                    }
                }
            }
        }
        out.axes = std::move(new_axes);
        out.values = std::move(nv);
    }
    return out;
}

GriddedDensity mollify_density(const DensitySpec& f, double eps, const WeightedMetric& metric,
                               std::int64_t nodes_per_dim) {
    return mollify_density(GriddedDensity::sample(f, nodes_per_dim), eps, metric);
}

double grid_l1_distance(const GriddedDensity& a, const GriddedDensity& b) {
    if (a.axes.size() != b.axes.size() || a.values.size() != b.values.size()) {
        throw DimensionMismatch("grid_l1_distance: grids differ");
    }
    for (std::size_t m = 0; m < a.axes.size(); ++m) {
        if (std::fabs(a.axes[m].lo - b.axes[m].lo) > 1e-12 ||
            std::fabs(a.axes[m].step - b.axes[m].step) > 1e-15 ||
            a.axes[m].count != b.axes[m].count) {
            throw DimensionMismatch("grid_l1_distance: axes differ");
        }
    }
    double s = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        s += std::fabs(a.values[i] - b.values[i]);
    }
    return s * a.cell_volume();
}

double mollified_value_1d(const Component1D& f, double bw, double x) {
    const MollifierKernel& k = MollifierKernel::standard();
    return quadrature::composite_simpson(
        [&](double u) { return k.phi(u / bw) / bw * f.pdf(x - u); }, -bw, bw,
        kKernelQuadIntervals);
}

namespace {

// Composite-Simpson weights on per-dimension node vectors; the integrand
// combines per-axis plain and mollified values, so products of 1-D tables
// cover nu in {1, 2}.
struct AxisTable {
    std::vector<double> x;
    std::vector<double> w; // Simpson weights times step/3
    std::vector<double> f; // plain pdf
    std::vector<double> g; // mollified pdf
};

AxisTable axis_table(const Component1D& comp, double lo, double hi, std::int64_t nodes,
                     double bw) {
    AxisTable t;
    if (nodes % 2 == 0) {
        ++nodes;
    }
    const double h = (hi - lo) / static_cast<double>(nodes - 1);
    t.x.resize(static_cast<std::size_t>(nodes));
    t.w.resize(static_cast<std::size_t>(nodes));
    t.f.resize(static_cast<std::size_t>(nodes));
    t.g.assign(static_cast<std::size_t>(nodes), 0.0);
    for (std::int64_t i = 0; i < nodes; ++i) {
        t.x[static_cast<std::size_t>(i)] = lo + h * static_cast<double>(i);
        const double simpson = (i == 0 || i == nodes - 1) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        t.w[static_cast<std::size_t>(i)] = simpson * h / 3.0;
        t.f[static_cast<std::size_t>(i)] = comp.pdf(t.x[static_cast<std::size_t>(i)]);
        if (bw > 0.0) {
            t.g[static_cast<std::size_t>(i)] = mollified_value_1d(comp, bw, t.x[static_cast<std::size_t>(i)]);
        }
    }
    return t;
}

double l1_between(const std::vector<AxisTable>& pt, const std::vector<AxisTable>& qt,
                  bool p_mollified, bool q_mollified) {
    const std::size_t nu = pt.size();
    if (nu == 1) {
        const auto& a = pt[0];
        const auto& b = qt[0];
        double acc = 0.0;
        for (std::size_t i = 0; i < a.x.size(); ++i) {
            const double pv = p_mollified ? a.g[i] : a.f[i];
            const double qv = q_mollified ? b.g[i] : b.f[i];
            acc += a.w[i] * std::fabs(pv - qv);
        }
        return acc;
    }
    if (nu == 2) {
        double acc = 0.0;
        for (std::size_t i = 0; i < pt[0].x.size(); ++i) {
            const double p0 = p_mollified ? pt[0].g[i] : pt[0].f[i];
            const double q0 = q_mollified ? qt[0].g[i] : qt[0].f[i];
            double inner = 0.0;
            for (std::size_t j = 0; j < pt[1].x.size(); ++j) {
                const double p1 = p_mollified ? pt[1].g[j] : pt[1].f[j];
                const double q1 = q_mollified ? qt[1].g[j] : qt[1].f[j];
                inner += pt[1].w[j] * std::fabs(p0 * p1 - q0 * q1);
            }
            acc += pt[0].w[i] * inner;
        }
        return acc;
    }
    throw InvalidParameter("analytic L1 checks support nu <= 2");
}

std::vector<AxisTable> build_tables(const DensitySpec& f, const DensitySpec& other,
                                    const WeightedMetric& metric, double eps,
                                    std::int64_t nodes) {
    std::vector<AxisTable> tables;
    for (std::int64_t m = 0; m < f.nu(); ++m) {
        const auto [flo, fhi] = f.comps[static_cast<std::size_t>(m)].range(1e-12);
        const auto [olo, ohi] = other.comps[static_cast<std::size_t>(m)].range(1e-12);
        const double bw = eps > 0.0 ? eps * metric.weights[static_cast<std::size_t>(m)] : 0.0;
        const double lo = std::min(flo, olo) - bw;
        const double hi = std::max(fhi, ohi) + bw;
        tables.push_back(axis_table(f.comps[static_cast<std::size_t>(m)], lo, hi, nodes, bw));
    }
    return tables;
}

} // namespace

bool SmoothingReport::all_hold(double tol) const {
    return std::all_of(rows.begin(), rows.end(),
                       [tol](const CheckRow& r) { return r.lhs <= r.rhs * (1.0 + tol) + 1e-14; });
}

bool DifferenceReport::all_hold(double tol) const {
    return std::all_of(rows.begin(), rows.end(),
                       [tol](const CheckRow& r) { return r.lhs <= r.rhs * (1.0 + tol) + 1e-14; });
}

SmoothingReport smoothing_error_check(const DensitySpec& f, std::span<const double> eps_grid,
                                      const WeightedMetric& metric) {
    f.validate();
    metric.validate();
    if (static_cast<std::int64_t>(metric.weights.size()) < f.nu()) {
        throw DimensionMismatch("smoothing_error_check: metric too short");
    }
    const MollifierKernel& kernel = MollifierKernel::standard();
    SmoothingReport rep;
    for (std::int64_t m = 0; m < f.nu(); ++m) {
        rep.weighted_derivative_norm += metric.weights[static_cast<std::size_t>(m)] *
                                        f.comps[static_cast<std::size_t>(m)].l1_dpdf();
    }
    const std::int64_t nodes = f.default_nodes();
    for (const double eps : eps_grid) {
        const auto tables = build_tables(f, f, metric, eps, nodes);
        CheckRow row;
        row.eps = eps;
        row.lhs = l1_between(tables, tables, false, true);
        row.rhs = kernel.c_phi_2 * eps * rep.weighted_derivative_norm;
        row.ratio = row.rhs > 0.0 ? row.lhs / row.rhs : 0.0;
        rep.rows.push_back(row);
    }
    return rep;
}

DifferenceReport mollified_difference_check(const DensitySpec& p, const DensitySpec& q,
                                            std::span<const double> eps_grid,
                                            const WeightedMetric& metric) {
    p.validate();
    q.validate();
    if (p.nu() != q.nu()) {
        throw DimensionMismatch("mollified_difference_check: dimension mismatch");
    }
    const MollifierKernel& kernel = MollifierKernel::standard();
    DifferenceReport rep;
    for (std::int64_t m = 0; m < p.nu(); ++m) {
        rep.w1 += w1_density_1d(p.comps[static_cast<std::size_t>(m)],
                                q.comps[static_cast<std::size_t>(m)],
                                metric.weights[static_cast<std::size_t>(m)]);
    }
    const std::int64_t nodes = std::max(p.default_nodes(), q.default_nodes());
    for (const double eps : eps_grid) {
        const auto ptab = build_tables(p, q, metric, eps, nodes);
        const auto qtab = build_tables(q, p, metric, eps, nodes);
        CheckRow row;
        row.eps = eps;
        row.lhs = l1_between(ptab, qtab, true, true);
        row.rhs = kernel.c_phi_1 / eps * rep.w1;
        row.ratio = row.rhs > 0.0 ? row.lhs / row.rhs : 0.0;
        rep.rows.push_back(row);
    }
    return rep;
}

double InterpolationResult::bound_curve(double eps) const {
    const MollifierKernel& kernel = MollifierKernel::standard();
    return 2.0 * kernel.c_phi_2 * eps * d_const + kernel.c_phi_1 * w1 / eps;
}

InterpolationResult interpolation_bound(const DensitySpec& p, const DensitySpec& q,
                                        const WeightedMetric& metric, double d_const) {
    if (!(d_const > 0.0)) {
        throw InvalidParameter("interpolation_bound: D must be positive");
    }
    const MollifierKernel& kernel = MollifierKernel::standard();
    InterpolationResult res;
    res.d_const = d_const;
    res.c_explicit = 8.0 * kernel.c_phi_1 * kernel.c_phi_2;
    for (std::int64_t m = 0; m < p.nu(); ++m) {
        res.w1 += w1_density_1d(p.comps[static_cast<std::size_t>(m)],
                                q.comps[static_cast<std::size_t>(m)],
                                metric.weights[static_cast<std::size_t>(m)]);
    }
    res.bound = res.c_explicit * d_const * res.w1;
    res.eps_opt = res.w1 > 0.0
                      ? std::sqrt(kernel.c_phi_1 * res.w1 / (2.0 * d_const * kernel.c_phi_2))
                      : 0.0;
    const std::int64_t nodes = std::max(p.default_nodes(), q.default_nodes());
    const auto ptab = build_tables(p, q, metric, 0.0, nodes);
    const auto qtab = build_tables(q, p, metric, 0.0, nodes);
    res.lhs_l1 = l1_between(ptab, qtab, false, false);
    res.holds = res.lhs_l1 * res.lhs_l1 <= res.bound * (1.0 + 1e-6) + 1e-14;
    return res;
}

GaussianD gaussian_D(std::span<const double> joint_cov, std::int64_t dim,
                     std::int64_t past_dim, const WeightedMetric& metric) {
    if (dim < 1 || past_dim < 0 || past_dim >= dim ||
        joint_cov.size() != static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim)) {
        throw InvalidParameter("gaussian_D: bad covariance shape");
    }
    const std::int64_t nf = dim - past_dim;
    if (static_cast<std::int64_t>(metric.weights.size()) < nf) {
        throw DimensionMismatch("gaussian_D: metric has fewer weights than future coordinates");
    }
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
        cov(joint_cov.data(), dim, dim);
    const Eigen::MatrixXd sff = cov.block(past_dim, past_dim, nf, nf);

    GaussianD out;
    const double two_over_pi = 2.0 / 3.14159265358979323846;

    const Eigen::MatrixXd prec_marg = sff.inverse();
    out.marginal_prec_diag.resize(static_cast<std::size_t>(nf));
    for (std::int64_t m = 0; m < nf; ++m) {
        const double qmm = prec_marg(m, m);
        out.marginal_prec_diag[static_cast<std::size_t>(m)] = qmm;
        out.d1 += metric.weights[static_cast<std::size_t>(m)] * std::sqrt(two_over_pi * qmm);
    }

    if (past_dim > 0) {
        const Eigen::MatrixXd spp = cov.block(0, 0, past_dim, past_dim);
        const Eigen::MatrixXd sfp = cov.block(past_dim, 0, nf, past_dim);
        const Eigen::MatrixXd cond = sff - sfp * spp.ldlt().solve(sfp.transpose());
        const Eigen::MatrixXd prec_cond = cond.inverse();
        out.conditional_prec_diag.resize(static_cast<std::size_t>(nf));
        for (std::int64_t m = 0; m < nf; ++m) {
            const double qmm = prec_cond(m, m);
            out.conditional_prec_diag[static_cast<std::size_t>(m)] = qmm;
            out.d2 += metric.weights[static_cast<std::size_t>(m)] * std::sqrt(two_over_pi * qmm);
        }
    } else {
        out.d2 = out.d1;
        out.conditional_prec_diag = out.marginal_prec_diag;
    }
    out.d = std::max(out.d1, out.d2);
    return out;
}

std::vector<double> linear_filter_covariance(const FilterSpec& filter, std::int64_t n,
                                             std::span<const std::int64_t> indices) {
    filter.validate();
    if (!filter.causal()) {
        throw NonCausalFilter("covariance: filter has no causal representation");
    }
    if (filter.innovation.kind != InnovationKind::Gaussian) {
        throw InvalidParameter("D not available in closed form: innovations are not Gaussian");
    }
    const double var = filter.innovation.stddev * filter.innovation.stddev;
    const std::int64_t L = filter.effective_lag();
    const std::int64_t m = static_cast<std::int64_t>(indices.size());

    std::vector<std::vector<double>> coefs(static_cast<std::size_t>(m));
    for (std::int64_t i = 0; i < m; ++i) {
        coefs[static_cast<std::size_t>(i)].resize(static_cast<std::size_t>(L) + 1);
        filter.coefs_at(static_cast<double>(indices[static_cast<std::size_t>(i)]) /
                            static_cast<double>(n),
                        coefs[static_cast<std::size_t>(i)]);
    }
    std::vector<double> cov(static_cast<std::size_t>(m) * static_cast<std::size_t>(m));
    for (std::int64_t i = 0; i < m; ++i) {
        for (std::int64_t j = i; j < m; ++j) {
            const std::int64_t gap = indices[static_cast<std::size_t>(j)] -
                                     indices[static_cast<std::size_t>(i)];
            double s = 0.0;
            if (gap <= L) {
                const auto& ci = coefs[static_cast<std::size_t>(i)];
                const auto& cj = coefs[static_cast<std::size_t>(j)];
                for (std::int64_t k = 0; k + gap <= L; ++k) {
                    s += ci[static_cast<std::size_t>(k)] * cj[static_cast<std::size_t>(k + gap)];
                }
            }
            cov[static_cast<std::size_t>(i * m + j)] = var * s;
            cov[static_cast<std::size_t>(j * m + i)] = var * s;
        }
    }
    return cov;
}

double ar1_marginal_d1(double rho, std::int64_t nu, const WeightedMetric& metric) {
    if (nu < 1 || static_cast<std::int64_t>(metric.weights.size()) < nu) {
        throw InvalidParameter("ar1_marginal_d1: bad dimensions");
    }
    const double two_over_pi = 2.0 / 3.14159265358979323846;
    double d = 0.0;
    for (std::int64_t m = 0; m < nu; ++m) {
        const double qmm = (nu > 1 && m > 0 && m < nu - 1) ? 1.0 + rho * rho : 1.0;
        d += metric.weights[static_cast<std::size_t>(m)] * std::sqrt(two_over_pi * qmm);
    }
    return d;
}

} // namespace depmix

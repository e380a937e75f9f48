#include "depmix/transport.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "depmix/csv.hpp"
#include "depmix/errors.hpp"
#include "depmix/rng.hpp"
#include "depmix/stats.hpp"

namespace depmix {

WeightedMetric WeightedMetric::geometric(std::int64_t nu) {
    WeightedMetric m;
    m.weights.resize(static_cast<std::size_t>(nu));
    double w = 0.5;
    for (auto& x : m.weights) {
        x = w;
        w *= 0.5;
    }
    return m;
}

WeightedMetric WeightedMetric::single(double w) {
    WeightedMetric m;
    m.weights = {w};
    m.validate();
    return m;
}

void WeightedMetric::validate() const {
    if (weights.empty()) {
        throw InvalidParameter("metric needs at least one weight");
    }
    double sum = 0.0;
    for (double w : weights) {
        if (!(w > 0.0)) {
            throw InvalidParameter("metric weights must be positive");
        }
        sum += w;
    }
    if (sum > 1.0 + 1e-12) {
        throw InvalidParameter("metric weights must sum to at most 1");
    }
}

double WeightedMetric::distance(std::span<const double> x, std::span<const double> y) const {
    if (x.size() != y.size() || x.size() > weights.size()) {
        throw DimensionMismatch("metric distance: dimension mismatch");
    }
    double s = 0.0;
    for (std::size_t m = 0; m < x.size(); ++m) {
        s += weights[m] * std::fabs(x[m] - y[m]);
    }
    return s;
}

double w1_exact_1d(const EmpiricalMeasure& p, const EmpiricalMeasure& q, double w) {
    if (p.nu != 1 || q.nu != 1) {
        throw DimensionMismatch("w1_exact_1d requires one-dimensional measures");
    }
    // Supports are sorted; integrate |F_P - F_Q| over the merged grid.
    std::size_t i = 0, j = 0;
    double fp = 0.0, fq = 0.0, acc = 0.0;
    double prev = 0.0;
    bool first = true;
    while (i < p.points.size() || j < q.points.size()) {
        double x;
        if (j >= q.points.size() || (i < p.points.size() && p.points[i][0] <= q.points[j][0])) {
            x = p.points[i][0];
        } else {
            x = q.points[j][0];
        }
        if (!first) {
            acc += std::fabs(fp - fq) * (x - prev);
        }
        while (i < p.points.size() && p.points[i][0] == x) {
            fp += p.masses[i];
            ++i;
        }
        while (j < q.points.size() && q.points[j][0] == x) {
            fq += q.masses[j];
            ++j;
        }
        prev = x;
        first = false;
    }
    return w * acc;
}

namespace {

// Successive shortest paths with potentials on the dense bipartite graph.
// Supplies and demands are real-valued; every augmentation saturates a
// supply, a demand, or a backward arc.
TransportPlan solve_dense(const EmpiricalMeasure& p, const EmpiricalMeasure& q,
                          const WeightedMetric& metric) {
    const std::int64_t np = p.size();
    const std::int64_t nq = q.size();
    const std::int64_t V = np + nq;
    constexpr double kInf = std::numeric_limits<double>::infinity();
    constexpr double kEps = 1e-15;

    std::vector<double> cost(static_cast<std::size_t>(np * nq));
    for (std::int64_t i = 0; i < np; ++i) {
        for (std::int64_t j = 0; j < nq; ++j) {
            cost[static_cast<std::size_t>(i * nq + j)] =
                metric.distance(p.points[static_cast<std::size_t>(i)],
                                q.points[static_cast<std::size_t>(j)]);
        }
    }

    std::vector<double> flow(static_cast<std::size_t>(np * nq), 0.0);
    std::vector<double> supply = p.masses;
    std::vector<double> demand = q.masses;
    std::vector<double> phi(static_cast<std::size_t>(V), 0.0);
    std::vector<double> dist(static_cast<std::size_t>(V));
    std::vector<std::int64_t> prev(static_cast<std::size_t>(V));
    std::vector<char> done(static_cast<std::size_t>(V));

    double remaining = 0.0;
    for (double s : supply) {
        remaining += s;
    }

    while (remaining > kEps) {
        std::fill(dist.begin(), dist.end(), kInf);
        std::fill(done.begin(), done.end(), 0);
        std::fill(prev.begin(), prev.end(), -1);
        for (std::int64_t i = 0; i < np; ++i) {
            if (supply[static_cast<std::size_t>(i)] > kEps) {
                dist[static_cast<std::size_t>(i)] = 0.0;
            }
        }
        // Dense Dijkstra over reduced costs.
        for (std::int64_t iter = 0; iter < V; ++iter) {
            std::int64_t u = -1;
            double best = kInf;
            for (std::int64_t v = 0; v < V; ++v) {
                if (!done[static_cast<std::size_t>(v)] && dist[static_cast<std::size_t>(v)] < best) {
                    best = dist[static_cast<std::size_t>(v)];
                    u = v;
                }
            }
            if (u < 0) {
                break;
            }
            done[static_cast<std::size_t>(u)] = 1;
            if (u < np) {
                const double du = dist[static_cast<std::size_t>(u)];
                for (std::int64_t j = 0; j < nq; ++j) {
                    if (done[static_cast<std::size_t>(np + j)]) {
                        continue;
                    }
                    const double rc = cost[static_cast<std::size_t>(u * nq + j)] +
                                      phi[static_cast<std::size_t>(u)] -
                                      phi[static_cast<std::size_t>(np + j)];
                    if (du + rc < dist[static_cast<std::size_t>(np + j)]) {
                        dist[static_cast<std::size_t>(np + j)] = du + rc;
                        prev[static_cast<std::size_t>(np + j)] = u;
                    }
                }
            } else {
                const std::int64_t j = u - np;
                const double du = dist[static_cast<std::size_t>(u)];
                for (std::int64_t i = 0; i < np; ++i) {
                    if (done[static_cast<std::size_t>(i)]) {
                        continue;
                    }
                    if (flow[static_cast<std::size_t>(i * nq + j)] > kEps) {
                        const double rc = -cost[static_cast<std::size_t>(i * nq + j)] +
                                          phi[static_cast<std::size_t>(u)] -
                                          phi[static_cast<std::size_t>(i)];
                        if (du + rc < dist[static_cast<std::size_t>(i)]) {
                            dist[static_cast<std::size_t>(i)] = du + rc;
                            prev[static_cast<std::size_t>(i)] = u;
                        }
                    }
                }
            }
        }

        std::int64_t target = -1;
        double best = kInf;
        for (std::int64_t j = 0; j < nq; ++j) {
            if (demand[static_cast<std::size_t>(j)] > kEps &&
                dist[static_cast<std::size_t>(np + j)] < best) {
                best = dist[static_cast<std::size_t>(np + j)];
                target = np + j;
            }
        }
        if (target < 0) {
            throw Error("transport: no augmenting path (mass mismatch?)");
        }

        double push = demand[static_cast<std::size_t>(target - np)];
        for (std::int64_t v = target; prev[static_cast<std::size_t>(v)] >= 0;
             v = prev[static_cast<std::size_t>(v)]) {
            const std::int64_t u = prev[static_cast<std::size_t>(v)];
            if (u < np) {
                if (prev[static_cast<std::size_t>(u)] < 0) {
                    push = std::min(push, supply[static_cast<std::size_t>(u)]);
                }
            } else {
                // Backward arc v -> u consumes existing flow (v is a P node).
                push = std::min(push, flow[static_cast<std::size_t>(v * nq + (u - np))]);
            }
        }
        for (std::int64_t v = target; prev[static_cast<std::size_t>(v)] >= 0;
             v = prev[static_cast<std::size_t>(v)]) {
            const std::int64_t u = prev[static_cast<std::size_t>(v)];
            if (u < np) {
                flow[static_cast<std::size_t>(u * nq + (v - np))] += push;
            } else {
                flow[static_cast<std::size_t>(v * nq + (u - np))] -= push;
            }
        }
        std::int64_t src = target;
        while (prev[static_cast<std::size_t>(src)] >= 0) {
            src = prev[static_cast<std::size_t>(src)];
        }
        supply[static_cast<std::size_t>(src)] -= push;
        demand[static_cast<std::size_t>(target - np)] -= push;
        remaining -= push;

        const double far = best;
        for (std::int64_t v = 0; v < V; ++v) {
            phi[static_cast<std::size_t>(v)] +=
                std::isinf(dist[static_cast<std::size_t>(v)]) ? far
                                                              : dist[static_cast<std::size_t>(v)];
        }
    }

    TransportPlan plan;
    for (std::int64_t i = 0; i < np; ++i) {
        for (std::int64_t j = 0; j < nq; ++j) {
            const double f = flow[static_cast<std::size_t>(i * nq + j)];
            if (f > kEps) {
                plan.value += f * cost[static_cast<std::size_t>(i * nq + j)];
                plan.arcs.push_back({i, j, f});
            }
        }
    }
    return plan;
}

EmpiricalMeasure subsample(const EmpiricalMeasure& m, std::int64_t target, std::uint64_t seed,
                           std::uint64_t rep) {
    // Mass-weighted draws with replacement via the CDF.
    std::vector<double> cdf(m.masses.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < m.masses.size(); ++i) {
        acc += m.masses[i];
        cdf[i] = acc;
    }
    std::vector<std::vector<double>> pts;
    pts.reserve(static_cast<std::size_t>(target));
    for (std::int64_t i = 0; i < target; ++i) {
        const double u = rng::uniform01(seed, rng::stream_id(rng::StreamClass::Subsample, rep),
                                        static_cast<std::uint64_t>(i));
        const std::size_t idx = std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
        pts.push_back(m.points[std::min(idx, m.points.size() - 1)]);
    }
    std::vector<double> masses(pts.size(), 1.0 / static_cast<double>(target));
    return EmpiricalMeasure::from_points(std::move(pts), std::move(masses));
}

} // namespace

TransportPlan w1_lp(const EmpiricalMeasure& p, const EmpiricalMeasure& q,
                    const WeightedMetric& metric, const W1Options& options) {
    if (p.nu != q.nu) {
        throw DimensionMismatch("w1_lp: dimension mismatch");
    }
    metric.validate();
    if (static_cast<std::int64_t>(metric.weights.size()) < p.nu) {
        throw DimensionMismatch("w1_lp: metric has fewer weights than dimensions");
    }
    if (p.size() <= options.max_support && q.size() <= options.max_support) {
        return solve_dense(p, q, metric);
    }

    TransportPlan plan;
    plan.subsampled = true;
    std::vector<double> vals;
    for (int rep = 0; rep < options.subsample_repeats; ++rep) {
        const EmpiricalMeasure ps =
            p.size() > options.max_support
                ? subsample(p, options.max_support, options.seed, 2 * rep)
                : p;
        const EmpiricalMeasure qs =
            q.size() > options.max_support
                ? subsample(q, options.max_support, options.seed, 2 * rep + 1)
                : q;
        vals.push_back(solve_dense(ps, qs, metric).value);
    }
    plan.value = stats::mean(vals);
    plan.subsample_stderr = std::sqrt(stats::variance(vals));
    return plan;
}

namespace {

double probe_value(const EmpiricalMeasure& p, const EmpiricalMeasure& q,
                   const std::function<double(std::span<const double>)>& f) {
    double ep = 0.0, eq = 0.0;
    for (std::size_t i = 0; i < p.points.size(); ++i) {
        ep += p.masses[i] * f(p.points[i]);
    }
    for (std::size_t j = 0; j < q.points.size(); ++j) {
        eq += q.masses[j] * f(q.points[j]);
    }
    return std::fabs(ep - eq);
}

} // namespace

DualityReport kr_duality_gap(const EmpiricalMeasure& p, const EmpiricalMeasure& q,
                             const WeightedMetric& metric, int probe_count,
                             std::uint64_t seed) {
    DualityReport rep;
    rep.primal = w1_lp(p, q, metric).value;
    const std::int64_t nu = p.nu;

    double best = 0.0;
    int used = 0;

    // Signed weighted coordinate maps f(x) = sum_m w_m s_m x_m.
    auto combo = [&](const std::vector<double>& signs) {
        const double v = probe_value(p, q, [&](std::span<const double> x) {
            double s = 0.0;
            for (std::int64_t m = 0; m < nu; ++m) {
                s += metric.weights[static_cast<std::size_t>(m)] *
                     signs[static_cast<std::size_t>(m)] * x[static_cast<std::size_t>(m)];
            }
            return s;
        });
        best = std::max(best, v);
        ++used;
    };
    combo(std::vector<double>(static_cast<std::size_t>(nu), 1.0));
    for (int t = 0; t < std::max(0, probe_count / 3); ++t) {
        std::vector<double> signs(static_cast<std::size_t>(nu));
        for (std::int64_t m = 0; m < nu; ++m) {
            signs[static_cast<std::size_t>(m)] =
                (rng::bits(seed, rng::stream_id(rng::StreamClass::Probe, 1),
                           static_cast<std::uint64_t>(t * 64 + m)) &
                 1u)
                    ? 1.0
                    : -1.0;
        }
        combo(signs);
    }

    // Min-distance probes to random anchor sets from the merged support.
    std::vector<std::span<const double>> support;
    for (const auto& x : p.points) {
        support.emplace_back(x);
    }
    for (const auto& x : q.points) {
        support.emplace_back(x);
    }
    for (int t = 0; t < std::max(0, probe_count / 2); ++t) {
        const int set_size = 1 + static_cast<int>(
                                     rng::bits(seed, rng::stream_id(rng::StreamClass::Probe, 2),
                                               static_cast<std::uint64_t>(t)) %
                                     4u);
        std::vector<std::span<const double>> anchors;
        for (int s = 0; s < set_size; ++s) {
            const std::size_t idx =
                rng::bits(seed, rng::stream_id(rng::StreamClass::Probe, 3),
                          static_cast<std::uint64_t>(t * 8 + s)) %
                support.size();
            anchors.push_back(support[idx]);
        }
        const double v = probe_value(p, q, [&](std::span<const double> x) {
            double m = std::numeric_limits<double>::infinity();
            for (const auto& a : anchors) {
                m = std::min(m, metric.distance(x, a));
            }
            return m;
        });
        best = std::max(best, v);
        ++used;
    }

    // 1-D: potential with slope -w sign(F_P - F_Q), which attains the primal.
    if (nu == 1) {
        std::vector<double> grid;
        for (const auto& x : p.points) {
            grid.push_back(x[0]);
        }
        for (const auto& x : q.points) {
            grid.push_back(x[0]);
        }
        std::sort(grid.begin(), grid.end());
        grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
        std::vector<double> psi(grid.size(), 0.0);
        double fp = 0.0, fq = 0.0;
        std::size_t ip = 0, iq = 0;
        for (std::size_t t = 0; t + 1 < grid.size(); ++t) {
            while (ip < p.points.size() && p.points[ip][0] <= grid[t]) {
                fp += p.masses[ip++];
            }
            while (iq < q.points.size() && q.points[iq][0] <= grid[t]) {
                fq += q.masses[iq++];
            }
            const double slope = (fp > fq) ? -metric.weights[0]
                                 : (fp < fq) ? metric.weights[0]
                                             : 0.0;
            psi[t + 1] = psi[t] + slope * (grid[t + 1] - grid[t]);
        }
        const double v = probe_value(p, q, [&](std::span<const double> x) {
            const std::size_t idx =
                std::lower_bound(grid.begin(), grid.end(), x[0]) - grid.begin();
            return psi[std::min(idx, psi.size() - 1)];
        });
        best = std::max(best, v);
        ++used;
    }

    rep.best_dual = best;
    rep.gap = rep.primal - best;
    rep.probes = used;
    return rep;
}

void write_coupling_csv(const TransportPlan& plan, const std::filesystem::path& path) {
    csv::Writer w(path, {"source_index", "target_index", "mass"});
    for (const auto& arc : plan.arcs) {
        w.row({csv::cell(arc.from), csv::cell(arc.to), csv::cell(arc.mass)});
    }
}

} // namespace depmix

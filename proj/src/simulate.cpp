#include "depmix/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "depmix/errors.hpp"
#include "depmix/stats.hpp"

namespace depmix {

namespace {

double draw_innovation(const FilterSpec& filter, std::uint64_t seed, std::int64_t replica,
                       std::int64_t index, const SwapRange& star) {
    const auto cls = star.contains(index) ? rng::StreamClass::Star : rng::StreamClass::Base;
    return filter.innovation.draw(seed, rng::stream_id(cls, static_cast<std::uint64_t>(replica)),
                                  index);
}

// Walk-in-scenery path values for one replica at the requested columns.
void rws_replica(const FilterSpec& filter, std::int64_t replica, std::uint64_t seed,
                 std::span<const std::int64_t> cols, std::span<double> out) {
    const std::uint64_t base = rng::stream_id(rng::StreamClass::Base,
                                              static_cast<std::uint64_t>(replica));
    const std::uint64_t scenery = rng::stream_id(rng::StreamClass::Scenery,
                                                 static_cast<std::uint64_t>(replica));
    const std::int64_t max_col = cols.back();
    std::int64_t pos = 0; // S_0 = 0
    std::size_t c = 0;
    for (std::int64_t i = 1; i <= max_col && c < cols.size(); ++i) {
        const double step = filter.innovation.draw(seed, base, i);
        pos += step > 0.0 ? 1 : -1;
        if (cols[c] == i) {
            // Scenery is realized lazily: only visited sites are ever drawn.
            out[c] = (rng::bits(seed, scenery, rng::index_of(pos)) & 1u) ? 1.0 : -1.0;
            ++c;
        }
    }
}

struct LinearPlan {
    std::int64_t lag = 0;
    std::int64_t lo = 0;              // lowest innovation index needed
    std::int64_t hi = 0;              // highest innovation index needed
    std::vector<double> coefs;        // cols x (lag+1)
};

LinearPlan make_plan(const FilterSpec& filter, std::int64_t n,
                     std::span<const std::int64_t> cols) {
    LinearPlan plan;
    plan.lag = filter.effective_lag();
    plan.lo = cols.front() - plan.lag;
    plan.hi = cols.back();
    plan.coefs.resize(cols.size() * static_cast<std::size_t>(plan.lag + 1));
    for (std::size_t c = 0; c < cols.size(); ++c) {
        const double t = static_cast<double>(cols[c]) / static_cast<double>(n);
        filter.coefs_at(t, std::span<double>(&plan.coefs[c * (plan.lag + 1)],
                                             static_cast<std::size_t>(plan.lag + 1)));
    }
    return plan;
}

void linear_replica(const FilterSpec& filter, const LinearPlan& plan, std::uint64_t seed,
                    std::int64_t replica, const SwapRange& star,
                    std::span<const std::int64_t> cols, std::span<double> buf,
                    std::span<double> out) {
    for (std::int64_t idx = plan.lo; idx <= plan.hi; ++idx) {
        buf[static_cast<std::size_t>(idx - plan.lo)] =
            draw_innovation(filter, seed, replica, idx, star);
    }
    for (std::size_t c = 0; c < cols.size(); ++c) {
        const double* coef = &plan.coefs[c * (plan.lag + 1)];
        const double* eps = &buf[static_cast<std::size_t>(cols[c] - plan.lag - plan.lo)];
        // X_i = sum_k coef[k] * eps_{i-k}; eps window stored ascending.
        double acc = 0.0;
        for (std::int64_t k = 0; k <= plan.lag; ++k) {
            acc += coef[k] * eps[plan.lag - k];
        }
        out[c] = acc;
    }
}

std::vector<double> column_means(const FilterSpec& filter, std::int64_t n,
                                 std::span<const std::int64_t> cols, std::uint64_t seed,
                                 const SimulateOptions& opts, CenteringInfo& info) {
    std::vector<double> means(cols.size(), 0.0);
    if (!filter.centered) {
        info.mode = CenteringMode::None;
        return means;
    }
    if (opts.centering_override == CenteringMode::Analytic || !filter.causal()) {
        bool have_all = true;
        for (std::size_t c = 0; c < cols.size(); ++c) {
            const double t = static_cast<double>(cols[c]) / static_cast<double>(n);
            const auto m = filter.analytic_mean(t);
            if (!m) {
                have_all = false;
                break;
            }
            means[c] = *m;
        }
        if (have_all) {
            info.mode = CenteringMode::Analytic;
            return means;
        }
        throw InvalidParameter("centering requested but the innovation mean does not exist");
    }
    // Monte-Carlo pre-pass on its own stream class, recorded sample size.
    const std::int64_t rc = opts.mc_center_replicas;
    info.mode = CenteringMode::MonteCarlo;
    info.mc_replicas = rc;
    const LinearPlan plan = make_plan(filter, n, cols);
    std::vector<double> buf(static_cast<std::size_t>(plan.hi - plan.lo + 1));
    std::vector<double> val(cols.size());
    FilterSpec uncentered = filter;
    uncentered.centered = false;
    for (std::int64_t r = 0; r < rc; ++r) {
        // Center stream class: disjoint from the ensemble's replicas.
        for (std::int64_t idx = plan.lo; idx <= plan.hi; ++idx) {
            buf[static_cast<std::size_t>(idx - plan.lo)] = filter.innovation.draw(
                seed, rng::stream_id(rng::StreamClass::Center, static_cast<std::uint64_t>(r)), idx);
        }
        for (std::size_t c = 0; c < cols.size(); ++c) {
            const double* coef = &plan.coefs[c * (plan.lag + 1)];
            const double* eps = &buf[static_cast<std::size_t>(cols[c] - plan.lag - plan.lo)];
            double acc = 0.0;
            for (std::int64_t k = 0; k <= plan.lag; ++k) {
                acc += coef[k] * eps[plan.lag - k];
            }
            means[c] += acc;
        }
    }
    for (auto& m : means) {
        m /= static_cast<double>(rc);
    }
    return means;
}

} // namespace

std::int64_t PathEnsemble::col_offset(std::int64_t series_index) const {
    const auto it = std::lower_bound(columns.begin(), columns.end(), series_index);
    if (it == columns.end() || *it != series_index) {
        throw InvalidParameter("series index " + std::to_string(series_index) +
                               " not present in ensemble");
    }
    return it - columns.begin();
}

double PathEnsemble::at(std::int64_t replica, std::int64_t series_index) const {
    return values[static_cast<std::size_t>(replica) * columns.size() +
                  static_cast<std::size_t>(col_offset(series_index))];
}

std::span<const double> PathEnsemble::row(std::int64_t replica) const {
    return {&values[static_cast<std::size_t>(replica) * columns.size()], columns.size()};
}

PathEnsemble simulate_columns(const FilterSpec& filter, std::int64_t n, std::int64_t replicas,
                              std::span<const std::int64_t> cols, std::uint64_t seed,
                              const SimulateOptions& opts) {
    filter.validate();
    if (n < 1 || replicas < 1) {
        throw InvalidParameter("simulate: need n >= 1 and replicas >= 1");
    }
    if (cols.empty() || !std::is_sorted(cols.begin(), cols.end()) ||
        cols.front() < 1 || cols.back() > n) {
        throw InvalidParameter("simulate: columns must be sorted inside 1..n");
    }

    PathEnsemble ens;
    ens.n = n;
    ens.replicas = replicas;
    ens.seed = seed;
    ens.filter = filter;
    ens.columns.assign(cols.begin(), cols.end());
    ens.values.resize(static_cast<std::size_t>(replicas) * cols.size());

    if (filter.kind == FilterKind::RandomWalkScenery) {
        if (!opts.star.empty()) {
            throw NonCausalFilter("RandomWalkScenery has no causal representation");
        }
        parallel::for_blocks(opts.exec, replicas, [&](std::int64_t lo, std::int64_t hi) {
            for (std::int64_t r = lo; r < hi; ++r) {
                rws_replica(filter, r, seed, cols,
                            std::span<double>(&ens.values[static_cast<std::size_t>(r) * cols.size()],
                                              cols.size()));
            }
        });
        return ens;
    }

    const LinearPlan plan = make_plan(filter, n, cols);
    ens.truncation_tail = filter.coef_tail_sup(plan.lag + 1);
    if (ens.truncation_tail > 1e-9) {
        ens.warnings.push_back("truncation tail " + std::to_string(ens.truncation_tail) +
                               " exceeds 1e-9; raise truncation_lag for tighter results");
    }

    CenteringInfo cinfo;
    const std::vector<double> means = column_means(filter, n, cols, seed, opts, cinfo);
    ens.centering = cinfo;

    parallel::for_blocks(opts.exec, replicas, [&](std::int64_t lo, std::int64_t hi) {
        std::vector<double> buf(static_cast<std::size_t>(plan.hi - plan.lo + 1));
        for (std::int64_t r = lo; r < hi; ++r) {
            const std::span<double> out(&ens.values[static_cast<std::size_t>(r) * cols.size()],
                                        cols.size());
            linear_replica(filter, plan, seed, r, opts.star, cols, buf, out);
            if (filter.centered) {
                for (std::size_t c = 0; c < cols.size(); ++c) {
                    out[c] -= means[c];
                }
            }
        }
    });
    return ens;
}

PathEnsemble simulate(const FilterSpec& filter, std::int64_t n, std::int64_t replicas,
                      std::uint64_t seed, const SimulateOptions& opts) {
    std::vector<std::int64_t> cols(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) {
        cols[static_cast<std::size_t>(i)] = i + 1;
    }
    return simulate_columns(filter, n, replicas, cols, seed, opts);
}

double simulate_value_reference(const FilterSpec& filter, std::int64_t n, std::int64_t replica,
                                std::int64_t series_index, std::uint64_t seed, SwapRange star) {
    filter.validate();
    if (filter.kind == FilterKind::RandomWalkScenery) {
        std::int64_t pos = 0;
        for (std::int64_t i = 1; i <= series_index; ++i) {
            pos += draw_innovation(filter, seed, replica, i, SwapRange::none()) > 0.0 ? 1 : -1;
        }
        const std::uint64_t scenery =
            rng::stream_id(rng::StreamClass::Scenery, static_cast<std::uint64_t>(replica));
        return (rng::bits(seed, scenery, rng::index_of(pos)) & 1u) ? 1.0 : -1.0;
    }
    const std::int64_t lag = filter.effective_lag();
    std::vector<double> coef(static_cast<std::size_t>(lag) + 1);
    const double t = static_cast<double>(series_index) / static_cast<double>(n);
    filter.coefs_at(t, coef);
    double acc = 0.0;
    for (std::int64_t k = 0; k <= lag; ++k) {
        acc += coef[static_cast<std::size_t>(k)] *
               draw_innovation(filter, seed, replica, series_index - k, star);
    }
    if (filter.centered) {
        const auto m = filter.analytic_mean(t);
        if (!m) {
            throw InvalidParameter("reference evaluator supports analytic centering only");
        }
        acc -= *m;
    }
    return acc;
}

MomentEstimate marginal_moment(const PathEnsemble& ensemble, std::int64_t series_index, double p) {
    if (p < 1.0) {
        throw InvalidParameter("marginal_moment: order p must be >= 1");
    }
    const std::int64_t c = ensemble.col_offset(series_index);
    const std::size_t stride = ensemble.columns.size();
    std::vector<double> terms(static_cast<std::size_t>(ensemble.replicas));
    for (std::int64_t r = 0; r < ensemble.replicas; ++r) {
        const double v = ensemble.values[static_cast<std::size_t>(r) * stride +
                                         static_cast<std::size_t>(c)];
        terms[static_cast<std::size_t>(r)] = std::pow(std::fabs(v), p);
    }
    MomentEstimate est;
    est.replicas = ensemble.replicas;
    est.value = stats::mean(terms);
    est.stderr_value = stats::stderr_mean(terms);

    // Convergence diagnostics: with a finite p-th moment the largest term's
    // share of the sum vanishes and the first-half mean settles down; heavy
    // tails keep both statistics large at any sample size.
    double sum = 0.0, maxv = 0.0, half = 0.0;
    const std::size_t nh = terms.size() / 2;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        sum += terms[i];
        maxv = std::max(maxv, terms[i]);
        if (i < nh) {
            half += terms[i];
        }
    }
    const double max_share = sum > 0.0 ? maxv / sum : 0.0;
    const double half_mean = nh > 0 ? half / static_cast<double>(nh) : est.value;
    const double drift = est.value > 0.0 ? std::fabs(half_mean - est.value) / est.value : 0.0;
    est.nonconvergent = ensemble.replicas >= 1000 && (max_share > 0.02 || drift > 0.2);
    return est;
}

} // namespace depmix

#include "depmix/physdep.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "depmix/csv.hpp"
#include "depmix/errors.hpp"
#include "depmix/stats.hpp"

namespace depmix {

namespace {

// Geometric tail beyond the horizon when the filter admits a closed form:
// delta_1(G,h) = sup_t |c_h(t)| * E|eps - eps*| for linear filters.
std::optional<double> analytic_tail(const FilterSpec& filter, std::int64_t horizon) {
    switch (filter.kind) {
    case FilterKind::IidPassthrough:
        return 0.0;
    case FilterKind::TvMA:
        if (horizon >= static_cast<std::int64_t>(filter.ma_coefs.size())) {
            return 0.0;
        }
        return std::nullopt;
    case FilterKind::LinearGeometric:
    case FilterKind::TvAR1: {
        const auto pam = filter.innovation.pair_abs_moment(1.0);
        if (!pam) {
            return std::nullopt;
        }
        // True geometric tail, not the truncated one: the truncated filter's
        // tail is zero, but Theta should bound the untruncated target.
        const double r = filter.kind == FilterKind::LinearGeometric ? std::fabs(filter.rho)
                                                                    : filter.ar_coef.max_abs();
        return *pam * std::pow(r, static_cast<double>(horizon)) / (1.0 - r);
    }
    case FilterKind::RandomWalkScenery:
        return std::nullopt;
    }
    return std::nullopt;
}

} // namespace

double geometric_tail_extrapolation(std::span<const double> delta1, std::int64_t horizon,
                                    std::int64_t fit_lags) {
    if (horizon >= static_cast<std::int64_t>(delta1.size())) {
        throw InvalidParameter("tail extrapolation: horizon beyond the profile");
    }
    std::vector<double> xs, ys;
    for (std::int64_t h = std::max<std::int64_t>(horizon - fit_lags + 1, 1); h <= horizon; ++h) {
        const double v = delta1[static_cast<std::size_t>(h)];
        if (v > 0.0) {
            xs.push_back(static_cast<double>(h));
            ys.push_back(std::log(v));
        }
    }
    if (xs.size() < 4) {
        throw ExtrapolationRefused("tail extrapolation: too few positive lags to fit");
    }
    const auto fit = stats::fit_line(xs, ys);
    if (fit.r2 < 0.9 || fit.slope >= 0.0) {
        throw ExtrapolationRefused("tail extrapolation refused: no geometric envelope (R^2=" +
                                   std::to_string(fit.r2) + ")");
    }
    const double ratio = std::exp(fit.slope);
    return std::exp(fit.intercept + fit.slope * static_cast<double>(horizon + 1)) /
           (1.0 - ratio);
}

std::vector<double> default_t_grid(const FilterSpec& filter) {
    if (filter.causal() && filter.time_varying()) {
        return {0.0, 0.25, 0.5, 0.75, 1.0};
    }
    return {0.5};
}

DeltaEstimate estimate_delta(const FilterSpec& filter, double p, std::int64_t lag,
                             std::int64_t replicas, std::span<const double> t_grid,
                             std::uint64_t seed, int bootstrap_resamples, Exec exec) {
    if (!filter.causal()) {
        throw NonCausalFilter("physical dependence undefined: no causal representation");
    }
    if (p < 1.0) {
        throw InvalidParameter("estimate_delta: order p must be >= 1");
    }
    if (t_grid.empty()) {
        throw InvalidParameter("estimate_delta: empty time grid");
    }

    DeltaEstimate best;
    best.replicas = replicas;
    best.value = -1.0;
    std::vector<double> terms(static_cast<std::size_t>(replicas));
    for (const double t : t_grid) {
        // Common innovations across t: only coefficients change.
        const PairSample pair = single_swap_pair(filter, t, lag, replicas, seed, exec);
        for (std::int64_t r = 0; r < replicas; ++r) {
            terms[static_cast<std::size_t>(r)] =
                std::pow(std::fabs(pair.base[static_cast<std::size_t>(r)] -
                                   pair.star[static_cast<std::size_t>(r)]),
                         p);
        }
        const double m = stats::mean(terms);
        const double value = m <= 0.0 ? 0.0 : std::pow(m, 1.0 / p);
        if (value > best.value) {
            best.value = value;
            best.t_at_max = t;
            const double se_m = stats::stderr_mean(terms);
            best.stderr_delta =
                (m > 0.0) ? (1.0 / p) * std::pow(m, 1.0 / p - 1.0) * se_m : 0.0;
            best.stderr_boot = (m > 0.0 && bootstrap_resamples > 1)
                                   ? stats::bootstrap_stderr_power_mean(
                                         terms, 1.0 / p, bootstrap_resamples, seed,
                                         rng::stream_id(rng::StreamClass::Bootstrap,
                                                        static_cast<std::uint64_t>(lag)))
                                   : 0.0;
        }
    }
    return best;
}

DependenceProfile estimate_profile(const FilterSpec& filter, const PhysdepPolicy& policy) {
    if (!filter.causal()) {
        throw NonCausalFilter("physical dependence undefined: no causal representation");
    }
    if (policy.replicas < 1000) {
        throw InvalidParameter("physdep: need at least 1000 replicas");
    }

    DependenceProfile prof;
    prof.p = policy.p;
    prof.max_lag = policy.max_lag;
    prof.t_grid = policy.t_grid.empty() ? default_t_grid(filter) : policy.t_grid;
    prof.seed = policy.seed;
    prof.replicas = policy.replicas;

    if (policy.check_moment) {
        // Moment precondition via the marginal-moment diagnostic at the
        // series end (t = 1); mirrors the undefined-measure case.
        const std::int64_t probe_r = std::min<std::int64_t>(policy.replicas, 100000);
        const std::int64_t probe_n = 64;
        const std::vector<std::int64_t> cols{probe_n};
        SimulateOptions opts;
        opts.exec = policy.exec;
        const PathEnsemble probe = simulate_columns(filter, probe_n, probe_r, cols, policy.seed);
        const MomentEstimate m = marginal_moment(probe, probe_n, policy.p);
        if (m.nonconvergent) {
            throw UndefinedDependence(
                "physical dependence measure undefined: E|X|^p estimate is nonconvergent (" +
                filter.describe() + ")");
        }
    }

    prof.delta1.resize(static_cast<std::size_t>(policy.max_lag) + 1);
    for (std::int64_t h = 0; h <= policy.max_lag; ++h) {
        prof.delta1[static_cast<std::size_t>(h)] =
            estimate_delta(filter, 1.0, h, policy.replicas, prof.t_grid, policy.seed,
                           policy.bootstrap_resamples, policy.exec);
    }
    if (policy.p == 1.0) {
        prof.delta = prof.delta1;
    } else {
        prof.delta.resize(static_cast<std::size_t>(policy.max_lag) + 1);
        for (std::int64_t h = 0; h <= policy.max_lag; ++h) {
            prof.delta[static_cast<std::size_t>(h)] =
                estimate_delta(filter, policy.p, h, policy.replicas, prof.t_grid, policy.seed,
                               policy.bootstrap_resamples, policy.exec);
        }
    }

    const auto tail = analytic_tail(filter, policy.max_lag + 1);
    if (tail) {
        prof.tail_beyond_horizon = *tail;
        prof.tail_kind = *tail == 0.0 ? TailKind::Zero : TailKind::Analytic;
    } else {
        std::vector<double> d1(prof.delta1.size());
        for (std::size_t i = 0; i < d1.size(); ++i) {
            d1[i] = prof.delta1[i].value;
        }
        prof.tail_beyond_horizon =
            geometric_tail_extrapolation(d1, policy.max_lag, policy.extrapolation_lags);
        prof.tail_kind = TailKind::Extrapolated;
    }

    prof.theta.assign(static_cast<std::size_t>(policy.max_lag) + 1, 0.0);
    double acc = prof.tail_beyond_horizon;
    for (std::int64_t k = policy.max_lag; k >= 0; --k) {
        acc += prof.delta1[static_cast<std::size_t>(k)].value;
        prof.theta[static_cast<std::size_t>(k)] = acc;
    }
    return prof;
}

double DependenceProfile::theta_at(std::int64_t k) const {
    if (k < 0 || k > max_lag) {
        throw InvalidParameter("theta_at: lag outside the estimated horizon");
    }
    return theta[static_cast<std::size_t>(k)];
}

double DependenceProfile::theta_upper(std::int64_t k, double z) const {
    if (k < 0 || k > max_lag) {
        throw InvalidParameter("theta_upper: lag outside the estimated horizon");
    }
    double var = 0.0;
    for (std::int64_t h = k; h <= max_lag; ++h) {
        const double se = delta1[static_cast<std::size_t>(h)].stderr_value();
        var += se * se;
    }
    return theta[static_cast<std::size_t>(k)] + z * std::sqrt(var);
}

double theta_tail(const DependenceProfile& profile, std::int64_t k) {
    if (profile.delta1.empty()) {
        throw InvalidParameter("theta_tail: profile lacks order-1 estimates");
    }
    return profile.theta_at(k);
}

void write_profile_csv(const DependenceProfile& profile, const std::filesystem::path& path) {
    csv::Writer w(path, {"lag", "delta_p", "stderr", "theta"});
    for (std::int64_t h = 0; h <= profile.max_lag; ++h) {
        const auto& d = profile.delta[static_cast<std::size_t>(h)];
        w.row({csv::cell(h), csv::cell(d.value), csv::cell(d.stderr_value()),
               csv::cell(profile.theta[static_cast<std::size_t>(h)])});
    }
}

void write_profile_json(const DependenceProfile& profile, const std::filesystem::path& path) {
    nlohmann::json j;
    j["p"] = profile.p;
    j["max_lag"] = profile.max_lag;
    j["t_grid"] = profile.t_grid;
    j["replicas"] = profile.replicas;
    j["seed"] = profile.seed;
    j["tail_beyond_horizon"] = profile.tail_beyond_horizon;
    j["tail_kind"] = profile.tail_kind == TailKind::Zero         ? "zero"
                     : profile.tail_kind == TailKind::Analytic   ? "analytic"
                                                                 : "extrapolated";
    auto dump = [](const std::vector<DeltaEstimate>& v, const char* field) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& d : v) {
            arr.push_back({{"value", d.value},
                           {"stderr", d.stderr_value()},
                           {"t_at_max", d.t_at_max}});
        }
        (void)field;
        return arr;
    };
    j["delta"] = dump(profile.delta, "delta");
    j["delta1"] = dump(profile.delta1, "delta1");
    j["theta"] = profile.theta;
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot open " + path.string());
    }
    out << j.dump(2) << '\n';
}

} // namespace depmix

#include "depmix/coupling.hpp"

#include <cmath>

#include "depmix/errors.hpp"

namespace depmix {

namespace {

void require_causal(const FilterSpec& filter, const char* what) {
    if (!filter.causal()) {
        throw NonCausalFilter(std::string(what) + ": filter has no causal representation");
    }
}

std::vector<std::int64_t> block_columns(std::int64_t from, std::int64_t to) {
    std::vector<std::int64_t> cols;
    cols.reserve(static_cast<std::size_t>(to - from + 1));
    for (std::int64_t i = from; i <= to; ++i) {
        cols.push_back(i);
    }
    return cols;
}

void check_block_args(std::int64_t j, std::int64_t k, std::int64_t n) {
    if (!(1 <= j && j <= n) || !(1 <= k && k <= n - j)) {
        throw InvalidParameter("block coupling needs 1 <= j <= n and 1 <= k <= n - j");
    }
}

} // namespace

PairSample single_swap_pair(const FilterSpec& filter, double t, std::int64_t lag,
                            std::int64_t replicas, std::uint64_t seed, Exec exec) {
    require_causal(filter, "single_swap_pair");
    filter.validate();
    if (lag < 0 || replicas < 1) {
        throw InvalidParameter("single_swap_pair: need lag >= 0 and replicas >= 1");
    }
    const std::int64_t L = filter.effective_lag();
    std::vector<double> coef(static_cast<std::size_t>(L) + 1);
    filter.coefs_at(t, coef);

    PairSample out;
    out.t = t;
    out.lag = lag;
    out.base.resize(static_cast<std::size_t>(replicas));
    out.star.resize(static_cast<std::size_t>(replicas));

    parallel::for_blocks(exec, replicas, [&](std::int64_t lo, std::int64_t hi) {
        for (std::int64_t r = lo; r < hi; ++r) {
            const std::uint64_t sb = rng::stream_id(rng::StreamClass::Base,
                                                    static_cast<std::uint64_t>(r));
            const std::uint64_t ss = rng::stream_id(rng::StreamClass::Star,
                                                    static_cast<std::uint64_t>(r));
            double acc = 0.0;
            double diff = 0.0;
            for (std::int64_t kk = 0; kk <= L; ++kk) {
                const std::int64_t idx = lag - kk;
                const double e = filter.innovation.draw(seed, sb, idx);
                acc += coef[static_cast<std::size_t>(kk)] * e;
                if (idx == 0) {
                    const double es = filter.innovation.draw(seed, ss, idx);
                    diff = coef[static_cast<std::size_t>(kk)] * (es - e);
                }
            }
            out.base[static_cast<std::size_t>(r)] = acc;
            out.star[static_cast<std::size_t>(r)] = acc + diff;
        }
    });
    return out;
}

BlockPairSample block_swap_pair(const FilterSpec& filter, std::int64_t j, std::int64_t k,
                                std::int64_t n, std::int64_t ell, std::int64_t replicas,
                                std::uint64_t seed, Exec exec) {
    require_causal(filter, "block_swap_pair");
    check_block_args(j, k, n);
    if (ell < 0) {
        throw InvalidParameter("block_swap_pair: ell must be >= 0");
    }
    const auto cols = block_columns(j + k, n);

    SimulateOptions lhs_opts;
    lhs_opts.exec = exec;
    lhs_opts.star = (ell == 0) ? SwapRange::none() : SwapRange::block(j - ell + 1, j);
    SimulateOptions rhs_opts;
    rhs_opts.exec = exec;
    rhs_opts.star = SwapRange::block(j - ell, j);

    PathEnsemble lhs = simulate_columns(filter, n, replicas, cols, seed, lhs_opts);
    PathEnsemble rhs = simulate_columns(filter, n, replicas, cols, seed, rhs_opts);

    BlockPairSample out;
    out.j = j;
    out.k = k;
    out.n = n;
    out.ell = ell;
    out.nu = static_cast<std::int64_t>(cols.size());
    out.lhs = std::move(lhs.values);
    out.rhs = std::move(rhs.values);
    return out;
}

CoupledEnsemble tilde_ensemble(const FilterSpec& filter, std::int64_t j, std::int64_t k,
                               std::int64_t n, std::int64_t replicas, std::uint64_t seed,
                               Exec exec) {
    require_causal(filter, "tilde_ensemble");
    check_block_args(j, k, n);

    const auto past_cols = block_columns(1, j);
    const auto fut_cols = block_columns(j + k, n);

    SimulateOptions base_opts;
    base_opts.exec = exec;
    SimulateOptions tilde_opts;
    tilde_opts.exec = exec;
    tilde_opts.star = SwapRange::up_to(j);

    CoupledEnsemble out;
    out.j = j;
    out.k = k;
    out.n = n;
    out.nu = static_cast<std::int64_t>(fut_cols.size());
    out.replicas = replicas;
    out.past = simulate_columns(filter, n, replicas, past_cols, seed, base_opts).values;
    out.x = simulate_columns(filter, n, replicas, fut_cols, seed, base_opts).values;
    out.x_tilde = simulate_columns(filter, n, replicas, fut_cols, seed, tilde_opts).values;
    return out;
}

std::vector<double> CoupledEnsemble::coupling_costs(std::span<const double> weights) const {
    if (static_cast<std::int64_t>(weights.size()) < nu) {
        throw InvalidParameter("coupling_costs: need one weight per block coordinate");
    }
    std::vector<double> costs(static_cast<std::size_t>(replicas));
    for (std::int64_t r = 0; r < replicas; ++r) {
        const double* a = &x[static_cast<std::size_t>(r * nu)];
        const double* b = &x_tilde[static_cast<std::size_t>(r * nu)];
        double s = 0.0;
        for (std::int64_t m = 0; m < nu; ++m) {
            s += weights[static_cast<std::size_t>(m)] * std::fabs(a[m] - b[m]);
        }
        costs[static_cast<std::size_t>(r)] = s;
    }
    return costs;
}

} // namespace depmix

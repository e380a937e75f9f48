#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "depmix/quadrature.hpp"
#include "depmix/rng.hpp"

namespace oracles {

ExactMixing rws_exact_mixing(std::int64_t n, std::int64_t j, std::int64_t k, std::int64_t a,
                             std::int64_t b) {
    using Key = std::pair<std::vector<int>, std::vector<int>>;
    std::map<Key, double> joint;

    const std::int64_t walks = std::int64_t(1) << n;
    for (std::int64_t wbits = 0; wbits < walks; ++wbits) {
        // Positions S_1..S_n for this walk.
        std::vector<std::int64_t> pos(static_cast<std::size_t>(n) + 1, 0);
        for (std::int64_t i = 1; i <= n; ++i) {
            pos[static_cast<std::size_t>(i)] =
                pos[static_cast<std::size_t>(i - 1)] + (((wbits >> (i - 1)) & 1) ? 1 : -1);
        }
        std::vector<std::int64_t> past_sites, fut_sites, sites;
        for (std::int64_t i = j - a + 1; i <= j; ++i) {
            past_sites.push_back(pos[static_cast<std::size_t>(i)]);
        }
        for (std::int64_t i = j + k; i <= j + k + b - 1; ++i) {
            fut_sites.push_back(pos[static_cast<std::size_t>(i)]);
        }
        sites = past_sites;
        sites.insert(sites.end(), fut_sites.begin(), fut_sites.end());
        std::sort(sites.begin(), sites.end());
        sites.erase(std::unique(sites.begin(), sites.end()), sites.end());

        const std::int64_t assignments = std::int64_t(1) << sites.size();
        const double w =
            std::ldexp(1.0, -static_cast<int>(n)) * std::ldexp(1.0, -static_cast<int>(sites.size()));
        for (std::int64_t sbits = 0; sbits < assignments; ++sbits) {
            auto value_at = [&](std::int64_t site) {
                const std::size_t idx =
                    std::lower_bound(sites.begin(), sites.end(), site) - sites.begin();
                return ((sbits >> idx) & 1) ? 1 : -1;
            };
            Key key;
            for (const auto s : past_sites) {
                key.first.push_back(value_at(s));
            }
            for (const auto s : fut_sites) {
                key.second.push_back(value_at(s));
            }
            joint[key] += w;
        }
    }

    // Index the joint pmf into a matrix.
    std::map<std::vector<int>, std::int64_t> uidx, vidx;
    for (const auto& [key, mass] : joint) {
        uidx.emplace(key.first, 0);
        vidx.emplace(key.second, 0);
    }
    std::int64_t next = 0;
    for (auto& [key, id] : uidx) {
        id = next++;
    }
    next = 0;
    for (auto& [key, id] : vidx) {
        id = next++;
    }
    const std::int64_t nu = static_cast<std::int64_t>(uidx.size());
    const std::int64_t nv = static_cast<std::int64_t>(vidx.size());
    std::vector<double> pi(static_cast<std::size_t>(nu * nv), 0.0);
    for (const auto& [key, mass] : joint) {
        pi[static_cast<std::size_t>(uidx[key.first] * nv + vidx[key.second])] += mass;
    }

    std::vector<double> mu(static_cast<std::size_t>(nu), 0.0), nuv(static_cast<std::size_t>(nv), 0.0);
    for (std::int64_t u = 0; u < nu; ++u) {
        for (std::int64_t v = 0; v < nv; ++v) {
            mu[static_cast<std::size_t>(u)] += pi[static_cast<std::size_t>(u * nv + v)];
            nuv[static_cast<std::size_t>(v)] += pi[static_cast<std::size_t>(u * nv + v)];
        }
    }
    std::vector<double> d(static_cast<std::size_t>(nu * nv));
    double beta = 0.0;
    for (std::int64_t u = 0; u < nu; ++u) {
        for (std::int64_t v = 0; v < nv; ++v) {
            d[static_cast<std::size_t>(u * nv + v)] =
                pi[static_cast<std::size_t>(u * nv + v)] -
                mu[static_cast<std::size_t>(u)] * nuv[static_cast<std::size_t>(v)];
            beta += std::fabs(d[static_cast<std::size_t>(u * nv + v)]);
        }
    }

    ExactMixing out;
    out.beta = 0.5 * beta;
    out.alpha = alpha_bruteforce(d, nu, nv);
    out.past_cells = nu;
    out.future_cells = nv;
    return out;
}

double alpha_bruteforce(std::span<const double> d, std::int64_t n_rows, std::int64_t n_cols) {
    double best = 0.0;
    for (std::int64_t s = 1; s < (std::int64_t(1) << n_rows); ++s) {
        for (std::int64_t t = 1; t < (std::int64_t(1) << n_cols); ++t) {
            double v = 0.0;
            for (std::int64_t u = 0; u < n_rows; ++u) {
                if (!((s >> u) & 1)) {
                    continue;
                }
                for (std::int64_t w = 0; w < n_cols; ++w) {
                    if ((t >> w) & 1) {
                        v += d[static_cast<std::size_t>(u * n_cols + w)];
                    }
                }
            }
            best = std::max(best, std::fabs(v));
        }
    }
    return best;
}

double binormal_rect(double a1, double b1, double a2, double b2, double r) {
    const double s = std::sqrt(1.0 - r * r);
    auto inner = [&](double z) {
        const double hi = (b2 - r * z) / s;
        const double lo = (a2 - r * z) / s;
        const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * 3.14159265358979323846);
        return pdf * (depmix::rng::phi_cdf(hi) - depmix::rng::phi_cdf(lo));
    };
    return depmix::quadrature::adaptive_simpson(inner, a1, b1, 1e-12);
}

double gaussian_pair_beta_exact(double r, int bins) {
    std::vector<double> edges(static_cast<std::size_t>(bins) + 1);
    edges[0] = -12.0;
    edges[static_cast<std::size_t>(bins)] = 12.0;
    for (int m = 1; m < bins; ++m) {
        edges[static_cast<std::size_t>(m)] =
            depmix::rng::inv_phi(static_cast<double>(m) / static_cast<double>(bins));
    }
    double beta = 0.0;
    const double cellmass = 1.0 / static_cast<double>(bins);
    for (int u = 0; u < bins; ++u) {
        for (int v = 0; v < bins; ++v) {
            const double p = binormal_rect(edges[static_cast<std::size_t>(u)],
                                           edges[static_cast<std::size_t>(u + 1)],
                                           edges[static_cast<std::size_t>(v)],
                                           edges[static_cast<std::size_t>(v + 1)], r);
            beta += std::fabs(p - cellmass * cellmass);
        }
    }
    return 0.5 * beta;
}

} // namespace oracles

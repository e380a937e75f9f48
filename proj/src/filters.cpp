#include "depmix/filters.hpp"

#include <algorithm>
#include <cmath>

#include "depmix/errors.hpp"

namespace depmix {

double AffineCoef::max_abs() const {
    return std::max(std::fabs(c0), std::fabs(c0 + c1));
}

FilterSpec FilterSpec::iid_passthrough(InnovationLaw law) {
    FilterSpec f;
    f.kind = FilterKind::IidPassthrough;
    f.innovation = law;
    f.validate();
    return f;
}

FilterSpec FilterSpec::linear_geometric(double rho, InnovationLaw law) {
    FilterSpec f;
    f.kind = FilterKind::LinearGeometric;
    f.rho = rho;
    f.innovation = law;
    f.validate();
    return f;
}

FilterSpec FilterSpec::tv_ar1(AffineCoef coef, InnovationLaw law) {
    FilterSpec f;
    f.kind = FilterKind::TvAR1;
    f.ar_coef = coef;
    f.innovation = law;
    f.validate();
    return f;
}

FilterSpec FilterSpec::tv_ma(std::vector<AffineCoef> coefs, InnovationLaw law) {
    FilterSpec f;
    f.kind = FilterKind::TvMA;
    f.ma_coefs = std::move(coefs);
    f.innovation = law;
    f.validate();
    return f;
}

FilterSpec FilterSpec::random_walk_scenery() {
    FilterSpec f;
    f.kind = FilterKind::RandomWalkScenery;
    f.innovation = InnovationLaw::rademacher();
    f.validate();
    return f;
}

std::int64_t default_truncation_lag(double rho_max) {
    if (rho_max <= 0.0) {
        return 0;
    }
    return static_cast<std::int64_t>(std::ceil(std::log(1e-12) / std::log(rho_max)));
}

void FilterSpec::validate() const {
    innovation.validate();
    switch (kind) {
    case FilterKind::IidPassthrough:
        return;
    case FilterKind::LinearGeometric:
        if (innovation.kind == InnovationKind::Bernoulli) {
            if (!(rho > 0.0 && rho <= 0.5)) {
                throw InvalidParameter("LinearGeometric with Bernoulli innovations needs rho in (0, 1/2]");
            }
        } else if (!(std::fabs(rho) < 1.0) || rho == 0.0) {
            throw InvalidParameter("LinearGeometric needs rho in (-1,1), nonzero");
        }
        return;
    case FilterKind::TvAR1:
        if (!(ar_coef.max_abs() < 1.0)) {
            throw InvalidParameter("TvAR1 coefficient must stay inside (-1,1) on [0,1]");
        }
        return;
    case FilterKind::TvMA:
        if (ma_coefs.empty()) {
            throw InvalidParameter("TvMA needs at least the lag-0 coefficient");
        }
        return;
    case FilterKind::RandomWalkScenery:
        if (innovation.kind != InnovationKind::Rademacher) {
            throw InvalidParameter("RandomWalkScenery walk steps must be Rademacher");
        }
        return;
    }
    throw InvalidParameter("unknown filter kind");
}

bool FilterSpec::time_varying() const {
    switch (kind) {
    case FilterKind::TvAR1:
        return ar_coef.c1 != 0.0;
    case FilterKind::TvMA:
        return std::any_of(ma_coefs.begin(), ma_coefs.end(),
                           [](const AffineCoef& c) { return c.c1 != 0.0; });
    default:
        return false;
    }
}

std::int64_t FilterSpec::effective_lag() const {
    switch (kind) {
    case FilterKind::IidPassthrough:
        return 0;
    case FilterKind::LinearGeometric:
        return truncation_lag >= 0 ? truncation_lag : default_truncation_lag(std::fabs(rho));
    case FilterKind::TvAR1:
        return truncation_lag >= 0 ? truncation_lag : default_truncation_lag(ar_coef.max_abs());
    case FilterKind::TvMA:
        return static_cast<std::int64_t>(ma_coefs.size()) - 1;
    case FilterKind::RandomWalkScenery:
        throw NonCausalFilter("RandomWalkScenery has no causal representation");
    }
    return 0;
}

void FilterSpec::coefs_at(double t, std::span<double> out) const {
    switch (kind) {
    case FilterKind::IidPassthrough:
        out[0] = 1.0;
        return;
    case FilterKind::LinearGeometric: {
        double c = 1.0;
        for (auto& v : out) {
            v = c;
            c *= rho;
        }
        return;
    }
    case FilterKind::TvAR1: {
        const double a = ar_coef(t);
        double c = 1.0;
        for (auto& v : out) {
            v = c;
            c *= a;
        }
        return;
    }
    case FilterKind::TvMA:
        for (std::size_t k = 0; k < out.size(); ++k) {
            out[k] = ma_coefs[k](t);
        }
        return;
    case FilterKind::RandomWalkScenery:
        throw NonCausalFilter("RandomWalkScenery has no causal representation");
    }
}

double FilterSpec::coef_tail_sup(std::int64_t from_lag) const {
    switch (kind) {
    case FilterKind::IidPassthrough:
        return from_lag <= 0 ? 1.0 : 0.0;
    case FilterKind::LinearGeometric: {
        const double r = std::fabs(rho);
        return std::pow(r, static_cast<double>(from_lag)) / (1.0 - r);
    }
    case FilterKind::TvAR1: {
        const double r = ar_coef.max_abs();
        if (r == 0.0) {
            return from_lag <= 0 ? 1.0 : 0.0;
        }
        return std::pow(r, static_cast<double>(from_lag)) / (1.0 - r);
    }
    case FilterKind::TvMA: {
        double s = 0.0;
        for (std::size_t k = std::max<std::int64_t>(from_lag, 0); k < ma_coefs.size(); ++k) {
            s += ma_coefs[k].max_abs();
        }
        return s;
    }
    case FilterKind::RandomWalkScenery:
        throw NonCausalFilter("RandomWalkScenery has no causal representation");
    }
    return 0.0;
}

std::optional<double> FilterSpec::analytic_mean(double t) const {
    if (kind == FilterKind::RandomWalkScenery) {
        return 0.0; // symmetric scenery
    }
    const auto m = innovation.mean_value();
    if (!m) {
        return std::nullopt;
    }
    const std::int64_t lag = effective_lag();
    std::vector<double> c(static_cast<std::size_t>(lag) + 1);
    coefs_at(t, c);
    double s = 0.0;
    for (double v : c) {
        s += v;
    }
    return *m * s;
}

std::string FilterSpec::describe() const {
    std::string base;
    switch (kind) {
    case FilterKind::IidPassthrough:
        base = "iid_passthrough";
        break;
    case FilterKind::LinearGeometric:
        base = "linear_geometric(rho=" + std::to_string(rho) + ")";
        break;
    case FilterKind::TvAR1:
        base = "tv_ar1(a=" + std::to_string(ar_coef.c0) + "+" + std::to_string(ar_coef.c1) + "t)";
        break;
    case FilterKind::TvMA:
        base = "tv_ma(q=" + std::to_string(ma_coefs.size() - 1) + ")";
        break;
    case FilterKind::RandomWalkScenery:
        base = "random_walk_scenery";
        break;
    }
    return base + " / " + innovation.describe();
}

} // namespace depmix

#include "depmix/innovations.hpp"

#include <cmath>

#include "depmix/errors.hpp"

namespace depmix {

InnovationLaw InnovationLaw::rademacher() {
    InnovationLaw law;
    law.kind = InnovationKind::Rademacher;
    return law;
}

InnovationLaw InnovationLaw::bernoulli(double p) {
    InnovationLaw law;
    law.kind = InnovationKind::Bernoulli;
    law.p = p;
    law.validate();
    return law;
}

InnovationLaw InnovationLaw::gaussian(double mean, double stddev) {
    InnovationLaw law;
    law.kind = InnovationKind::Gaussian;
    law.mean = mean;
    law.stddev = stddev;
    law.validate();
    return law;
}

InnovationLaw InnovationLaw::pareto(double shape) {
    InnovationLaw law;
    law.kind = InnovationKind::Pareto;
    law.shape = shape;
    law.validate();
    return law;
}

void InnovationLaw::validate() const {
    switch (kind) {
    case InnovationKind::Rademacher:
        return;
    case InnovationKind::Bernoulli:
        if (!(p > 0.0 && p < 1.0)) {
            throw InvalidParameter("Bernoulli p must lie in (0,1)");
        }
        return;
    case InnovationKind::Gaussian:
        if (!(stddev > 0.0)) {
            throw InvalidParameter("Gaussian stddev must be positive");
        }
        return;
    case InnovationKind::Pareto:
        if (!(shape > 0.0)) {
            throw InvalidParameter("Pareto shape must be positive");
        }
        return;
    }
    throw InvalidParameter("unknown innovation kind");
}

double InnovationLaw::draw(std::uint64_t seed, std::uint64_t stream, std::int64_t index) const {
    const std::uint64_t idx = rng::index_of(index);
    switch (kind) {
    case InnovationKind::Rademacher:
        return (rng::bits(seed, stream, idx) & 1u) ? 1.0 : -1.0;
    case InnovationKind::Bernoulli:
        return rng::uniform01(seed, stream, idx) < p ? 1.0 : 0.0;
    case InnovationKind::Gaussian:
        return mean + stddev * rng::normal(seed, stream, idx);
    case InnovationKind::Pareto:
        return std::pow(rng::uniform01(seed, stream, idx), -1.0 / shape);
    }
    return 0.0;
}

std::optional<double> InnovationLaw::mean_value() const {
    switch (kind) {
    case InnovationKind::Rademacher:
        return 0.0;
    case InnovationKind::Bernoulli:
        return p;
    case InnovationKind::Gaussian:
        return mean;
    case InnovationKind::Pareto:
        if (shape > 1.0) {
            return shape / (shape - 1.0);
        }
        return std::nullopt;
    }
    return std::nullopt;
}

bool InnovationLaw::abs_moment_finite(double order) const {
    if (kind == InnovationKind::Pareto) {
        return order < shape;
    }
    return true;
}

std::optional<double> InnovationLaw::pair_abs_moment(double order) const {
    const double pi = 3.14159265358979323846;
    if (order == 1.0) {
        switch (kind) {
        case InnovationKind::Rademacher:
            return 1.0; // |e - e'| is 0 or 2 with probability 1/2 each
        case InnovationKind::Bernoulli:
            return 2.0 * p * (1.0 - p);
        case InnovationKind::Gaussian:
            return 2.0 * stddev / std::sqrt(pi); // E|N(0, 2 sd^2)|
        case InnovationKind::Pareto:
            if (shape > 1.0) {
                return 2.0 * (1.0 / (shape - 1.0) - 1.0 / (2.0 * shape - 1.0));
            }
            return std::nullopt;
        }
    }
    if (order == 2.0) {
        switch (kind) {
        case InnovationKind::Rademacher:
            return 2.0;
        case InnovationKind::Bernoulli:
            return 2.0 * p * (1.0 - p);
        case InnovationKind::Gaussian:
            return 2.0 * stddev * stddev;
        case InnovationKind::Pareto:
            if (shape > 2.0) {
                // 2 Var(eps) for Pareto on [1, inf)
                const double var = shape / ((shape - 1.0) * (shape - 1.0) * (shape - 2.0));
                return 2.0 * var;
            }
            return std::nullopt;
        }
    }
    return std::nullopt;
}

std::string InnovationLaw::describe() const {
    switch (kind) {
    case InnovationKind::Rademacher:
        return "rademacher";
    case InnovationKind::Bernoulli:
        return "bernoulli(p=" + std::to_string(p) + ")";
    case InnovationKind::Gaussian:
        return "gaussian(mean=" + std::to_string(mean) + ",sd=" + std::to_string(stddev) + ")";
    case InnovationKind::Pareto:
        return "pareto(shape=" + std::to_string(shape) + ")";
    }
    return "?";
}

} // namespace depmix

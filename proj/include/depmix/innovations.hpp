#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "depmix/rng.hpp"

namespace depmix {

enum class InnovationKind { Rademacher, Bernoulli, Gaussian, Pareto };

// Law of the i.i.d. innovation sequence. Draws are pure functions of
// (seed, stream, index): same triple, same bits.
struct InnovationLaw {
    InnovationKind kind = InnovationKind::Rademacher;
    double p = 0.5;      // Bernoulli success probability
    double mean = 0.0;   // Gaussian
    double stddev = 1.0; // Gaussian
    double shape = 1.0;  // Pareto tail index, support [1, inf)

    static InnovationLaw rademacher();
    static InnovationLaw bernoulli(double p);
    static InnovationLaw gaussian(double mean, double stddev);
    static InnovationLaw pareto(double shape);

    void validate() const;

    double draw(std::uint64_t seed, std::uint64_t stream, std::int64_t index) const;

    // E[eps]; nullopt when the mean does not exist (Pareto shape <= 1).
    std::optional<double> mean_value() const;

    bool abs_moment_finite(double order) const;

    // E|eps - eps'|^order for an independent pair, closed form where known
    // (order 1 and 2 for all laws; Pareto requires shape > order).
    std::optional<double> pair_abs_moment(double order) const;

    std::string describe() const;
};

} // namespace depmix

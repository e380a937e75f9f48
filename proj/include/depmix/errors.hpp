#pragma once

#include <stdexcept>
#include <string>

namespace depmix {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidParameter : Error {
    using Error::Error;
};

// Thrown by physical-dependence operations on filters without a causal
// representation (e.g. random walk in random scenery).
struct NonCausalFilter : Error {
    using Error::Error;
};

// Thrown when the p-th moment estimate does not converge, so the
// dependence measure of that order is undefined.
struct UndefinedDependence : Error {
    using Error::Error;
};

// Mixing estimation: some past cell has too few replicas for a usable
// conditional law, and widening was exhausted or disabled.
struct InsufficientOccupancy : Error {
    using Error::Error;
};

// Tail extrapolation of the dependence profile refused (no geometric fit).
struct ExtrapolationRefused : Error {
    using Error::Error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

// Mollification grid too coarse relative to the kernel bandwidth.
struct GridTooCoarse : Error {
    using Error::Error;
};

} // namespace depmix

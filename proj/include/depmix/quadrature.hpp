#pragma once

#include <cstdint>
#include <functional>

namespace depmix::quadrature {

// Recursive adaptive Simpson with absolute tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth = 60);

// Composite Simpson on a uniform grid; intervals must be even and >= 2.
double composite_simpson(const std::function<double(double)>& f, double a, double b,
                         std::int64_t intervals);

} // namespace depmix::quadrature

#include "depmix/quadrature.hpp"

#include <cmath>

#include "depmix/errors.hpp"

namespace depmix::quadrature {

namespace {

double simpson(double fa, double fm, double fb, double h) {
    return (fa + 4.0 * fm + fb) * h / 6.0;
}

double adapt(const std::function<double(double)>& f, double a, double b, double fa, double fm,
             double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson(fa, flm, fm, m - a);
    const double right = simpson(fm, frm, fb, b - m);
    const double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return adapt(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adapt(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth) {
    if (!(b > a)) {
        return 0.0;
    }
    const double m = 0.5 * (a + b);
    const double fa = f(a);
    const double fm = f(m);
    const double fb = f(b);
    const double whole = simpson(fa, fm, fb, b - a);
    return adapt(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

double composite_simpson(const std::function<double(double)>& f, double a, double b,
                         std::int64_t intervals) {
    if (intervals < 2 || intervals % 2 != 0) {
        throw InvalidParameter("composite_simpson: intervals must be even and >= 2");
    }
    const double h = (b - a) / static_cast<double>(intervals);
    double acc = f(a) + f(b);
    for (std::int64_t i = 1; i < intervals; ++i) {
        acc += f(a + h * static_cast<double>(i)) * (i % 2 ? 4.0 : 2.0);
    }
    return acc * h / 3.0;
}

} // namespace depmix::quadrature

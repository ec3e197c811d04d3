#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "ltlab/errors.hpp"

namespace ltlab {

namespace detail {

template <class F>
double adaptive_simpson_rec(const F& f, double a, double b, double fa, double fm, double fb,
                            double whole, double tol, int depth, double& err_acc) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double err = left + right - whole;
    if (std::abs(err) <= 15.0 * tol || depth <= 0) {
        err_acc += std::abs(err) / 15.0;
        return left + right + err / 15.0;
    }
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, err_acc) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, err_acc);
}

}  // namespace detail

/// Adaptive Simpson quadrature of f over [a, b] to absolute tolerance tol.
/// Throws NumericError if the accumulated error estimate stays far from tol
/// (divergent or wildly singular integrand).
template <class F>
double adaptive_simpson(const F& f, double a, double b, double tol = 1e-12, int max_depth = 48) {
    if (a == b) return 0.0;
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    double err_acc = 0.0;
    const double v = detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth, err_acc);
    if (!(err_acc <= 1e4 * tol + 1e-12 * std::abs(v)) || !std::isfinite(v))
        throw NumericError("adaptive_simpson: failed to reach tolerance");
    return v;
}

/// As above but split at the given interior breakpoints (kinks, jumps).
template <class F>
double adaptive_simpson_split(const F& f, double a, double b, std::vector<double> breakpoints,
                              double tol = 1e-12, int max_depth = 48) {
    breakpoints.push_back(a);
    breakpoints.push_back(b);
    std::sort(breakpoints.begin(), breakpoints.end());
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        const double lo = breakpoints[i];
        const double hi = breakpoints[i + 1];
        if (hi <= a || lo >= b || hi <= lo) continue;
        acc += adaptive_simpson(f, std::max(lo, a), std::min(hi, b),
                                tol / static_cast<double>(breakpoints.size()), max_depth);
    }
    return acc;
}

/// Euler Beta function B(a, b) for positive arguments.
inline double beta_function(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0))
        throw std::invalid_argument("beta_function: arguments must be positive");
    return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

}  // namespace ltlab

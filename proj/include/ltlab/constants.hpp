#pragma once

#include <cmath>
#include <stdexcept>

#include "ltlab/quadrature.hpp"

namespace ltlab {

/// Semiclassical phase-space constant
///   (2 pi)^{-d} int (1 - |xi|^2)_+^gamma d xi
///     = Gamma(gamma + 1) / (2^d pi^{d/2} Gamma(gamma + 1 + d/2)).
inline double lt_classical(int d, double gamma) {
    if (d < 1) throw std::invalid_argument("lt_classical: dimension must be >= 1");
    if (!(gamma >= 0.0)) throw std::invalid_argument("lt_classical: gamma must be >= 0");
    return std::tgamma(gamma + 1.0) /
           (std::pow(2.0, d) * std::pow(M_PI, 0.5 * d) * std::tgamma(gamma + 1.0 + 0.5 * d));
}

/// Independent quadrature route for d <= 3: radial reduction
///   (2 pi)^{-d} |S^{d-1}| int_0^1 (1 - r^2)^gamma r^{d-1} dr,
/// integrated after the substitution r = sin(theta), which makes the
/// integrand smooth for every gamma >= 0.
inline double lt_classical_quadrature(int d, double gamma) {
    if (d < 1 || d > 3)
        throw std::invalid_argument("lt_classical_quadrature: d must be 1, 2 or 3");
    if (!(gamma >= 0.0))
        throw std::invalid_argument("lt_classical_quadrature: gamma must be >= 0");
    const double sphere = (d == 1) ? 2.0 : (d == 2) ? 2.0 * M_PI : 4.0 * M_PI;
    const double radial = adaptive_simpson(
        [&](double t) {
            return std::pow(std::cos(t), 2.0 * gamma + 1.0) * std::pow(std::sin(t), d - 1.0);
        },
        0.0, 0.5 * M_PI, 1e-13);
    return sphere * radial / std::pow(2.0 * M_PI, d);
}

struct NamedConstants {
    double c_thm1 = 0.0;     // 2 / (3 sqrt(3))
    double ratio_r = 0.0;    // c_thm1 / lt_classical(1, 1) = pi / sqrt(3)
    double c_keller = 0.0;   // 4 / (3 sqrt(3) pi), the one-bound-state value
    double two_lcl_11 = 0.0; // 2 * lt_classical(1, 1) = 4 / (3 pi)
};

inline NamedConstants named_constants() {
    NamedConstants c;
    c.c_thm1 = 2.0 / (3.0 * std::sqrt(3.0));
    c.ratio_r = M_PI / std::sqrt(3.0);
    c.c_keller = 4.0 / (3.0 * std::sqrt(3.0) * M_PI);
    c.two_lcl_11 = 2.0 * lt_classical(1, 1.0);
    if (!(c.c_keller < c.c_thm1 && c.c_thm1 < c.two_lcl_11))
        throw std::logic_error("named_constants: ordering violated");
    return c;
}

struct LtEntry {
    double lcl = 0.0;
    double bound = 0.0;  // ratio_r * lcl
};

inline LtEntry lt_table_entry(int d, double gamma) {
    LtEntry e;
    e.lcl = lt_classical(d, gamma);
    e.bound = named_constants().ratio_r * e.lcl;
    return e;
}

struct KellerMinimum {
    double x_star = 0.0;
    double min_value = 0.0;
};

/// Minimize f(X) = X - a X^{1/3} over X > 0: the closed form is
/// x* = (a/3)^{3/2}, f(x*) = -(2 / 3 sqrt(3)) a^{3/2}. The minimum is
/// verified by local sampling around x*.
inline KellerMinimum keller_minimize(double a) {
    if (!(a > 0.0)) throw std::invalid_argument("keller_minimize: a must be positive");
    KellerMinimum k;
    k.x_star = std::pow(a / 3.0, 1.5);
    k.min_value = -(2.0 / (3.0 * std::sqrt(3.0))) * std::pow(a, 1.5);
    const auto f = [a](double x) { return x - a * std::cbrt(x); };
    const double delta = 1e-4 * k.x_star;
    if (f(k.x_star + delta) < f(k.x_star) || f(k.x_star - delta) < f(k.x_star))
        throw NumericError("keller_minimize: local sampling contradicts the minimum");
    return k;
}

}  // namespace ltlab

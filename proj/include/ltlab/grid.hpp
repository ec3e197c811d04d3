#pragma once

#include <Eigen/Core>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace ltlab {

using Real = double;
using Complex = std::complex<double>;

/// Uniform mesh on [-L, L] with Dirichlet ends. Only the n_interior interior
/// nodes x_i = -L + i*h (i = 1..n_interior) carry values; both boundary
/// values are taken as zero throughout.
class Grid {
public:
    Grid() = default;

    Grid(double half_width, int n_interior)
        : L_(half_width), n_(n_interior), h_(2.0 * half_width / (n_interior + 1)) {
        if (!(half_width > 0.0))
            throw std::invalid_argument("Grid: half width must be positive");
        if (n_interior < 3)
            throw std::invalid_argument("Grid: need at least 3 interior nodes");
    }

    double half_width() const { return L_; }
    int n_interior() const { return n_; }
    double spacing() const { return h_; }

    double node(int i) const { return -L_ + (i + 1) * h_; }

    Eigen::VectorXd nodes() const {
        Eigen::VectorXd x(n_);
        for (int i = 0; i < n_; ++i) x[i] = node(i);
        return x;
    }

    /// Same interval, spacing halved. Old nodes are a subset of the new ones.
    Grid refined() const { return Grid(L_, 2 * n_ + 1); }

    /// Composite-Simpson quadrature weights for the interior nodes, boundary
    /// values counted as zero. For an odd number of subintervals the last
    /// three are closed with the 3/8 rule.
    Eigen::VectorXd weights() const {
        const int m = n_ + 1;  // number of subintervals over [-L, L]
        Eigen::VectorXd w = Eigen::VectorXd::Zero(n_ + 2);
        auto add_simpson = [&](int first, int last) {
            // last - first even; pattern (1,4,2,...,4,1) * h/3
            w[first] += h_ / 3.0;
            w[last] += h_ / 3.0;
            for (int i = first + 1; i < last; ++i)
                w[i] += (((i - first) % 2) ? 4.0 : 2.0) * h_ / 3.0;
        };
        if (m % 2 == 0) {
            add_simpson(0, m);
        } else {
            add_simpson(0, m - 3);
            w[m - 3] += 3.0 * h_ / 8.0;
            w[m - 2] += 9.0 * h_ / 8.0;
            w[m - 1] += 9.0 * h_ / 8.0;
            w[m] += 3.0 * h_ / 8.0;
        }
        return w.segment(1, n_);
    }

    friend bool operator==(const Grid& a, const Grid& b) {
        return a.L_ == b.L_ && a.n_ == b.n_;
    }

private:
    double L_ = 0.0;
    int n_ = 0;
    double h_ = 0.0;
};

inline Grid make_grid(double half_width, int n_interior) {
    return Grid(half_width, n_interior);
}

/// Node samples of a function on a grid.
template <class Scalar>
struct GridFunctionT {
    Grid grid;
    Eigen::VectorX<Scalar> values;
};

using RealGridFunction = GridFunctionT<double>;
using ComplexGridFunction = GridFunctionT<Complex>;

/// Simpson approximation of the integral over [-L, L] of node samples,
/// boundary values treated as zero.
template <class Derived>
typename Derived::Scalar integrate(const Grid& grid, const Eigen::MatrixBase<Derived>& values) {
    if (values.size() != grid.n_interior())
        throw std::invalid_argument("integrate: sample count does not match grid");
    const Eigen::VectorXd w = grid.weights();
    typename Derived::Scalar acc{};
    for (int i = 0; i < values.size(); ++i) acc += w[i] * values(i);
    return acc;
}

template <class Scalar>
Scalar integrate(const GridFunctionT<Scalar>& f) {
    return integrate(f.grid, f.values);
}

/// Quadrature inner product  sum_i w_i conj(f_i) g_i.
template <class DerivedA, class DerivedB>
Complex inner_product(const Grid& grid, const Eigen::MatrixBase<DerivedA>& f,
                      const Eigen::MatrixBase<DerivedB>& g) {
    if (f.size() != grid.n_interior() || g.size() != grid.n_interior())
        throw std::invalid_argument("inner_product: sample count does not match grid");
    const Eigen::VectorXd w = grid.weights();
    Complex acc{};
    for (int i = 0; i < f.size(); ++i) acc += w[i] * std::conj(Complex(f(i))) * Complex(g(i));
    return acc;
}

/// Central second-order difference with zero (Dirichlet) ghost values at both
/// ends. At the two end nodes this leaves a boundary artifact for functions
/// that do not vanish there.
template <class Derived>
Eigen::VectorX<typename Derived::Scalar> differentiate(const Grid& grid,
                                                       const Eigen::MatrixBase<Derived>& values) {
    using Scalar = typename Derived::Scalar;
    const int n = grid.n_interior();
    if (values.size() != n)
        throw std::invalid_argument("differentiate: sample count does not match grid");
    const double inv2h = 1.0 / (2.0 * grid.spacing());
    Eigen::VectorX<Scalar> d(n);
    for (int i = 0; i < n; ++i) {
        const Scalar up = (i + 1 < n) ? Scalar(values(i + 1)) : Scalar(0);
        const Scalar dn = (i > 0) ? Scalar(values(i - 1)) : Scalar(0);
        d[i] = (up - dn) * inv2h;
    }
    return d;
}

template <class Scalar>
GridFunctionT<Scalar> differentiate(const GridFunctionT<Scalar>& f) {
    return {f.grid, differentiate(f.grid, f.values)};
}

/// Two-level Richardson extrapolation: v_h at spacing h, v_h2 at h/2,
/// convergence order p.
template <class Scalar>
Scalar richardson(Scalar v_h, Scalar v_h2, int order) {
    if (order <= 0) throw std::invalid_argument("richardson: order must be positive");
    const double f = std::pow(2.0, order);
    return (f * v_h2 - v_h) / (f - 1.0);
}

/// Sample a callable on the grid nodes.
template <class F>
auto sample_function(const Grid& grid, F&& f) {
    using Scalar = decltype(f(0.0));
    GridFunctionT<Scalar> out{grid, Eigen::VectorX<Scalar>(grid.n_interior())};
    for (int i = 0; i < grid.n_interior(); ++i) out.values[i] = f(grid.node(i));
    return out;
}

}  // namespace ltlab

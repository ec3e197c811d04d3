#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "ltlab/errors.hpp"
#include "ltlab/grid.hpp"
#include "ltlab/rng.hpp"
#include "ltlab/spectra.hpp"

namespace ltlab {

/// N vector-functions with M channels, orthonormal in the grid's quadrature
/// inner product. Each function is stored as an n x M matrix of node samples.
struct OrthonormalSystem {
    Grid grid;
    int channels = 1;
    std::vector<Eigen::MatrixXcd> functions;

    int size() const { return static_cast<int>(functions.size()); }
};

/// Diagonal restriction U(x_i, x_i) of the projection kernel of the system:
/// u_{jk}(x, x) = sum_n phi_n(x, j) conj(phi_n(x, k)). Hermitian PSD at every
/// node by construction.
struct KernelDiagonal {
    Grid grid;
    int channels = 1;
    std::vector<Eigen::MatrixXcd> values;
};

inline Complex system_inner_product(const Grid& grid, const Eigen::MatrixXcd& f,
                                    const Eigen::MatrixXcd& g) {
    const Eigen::VectorXd w = grid.weights();
    Complex acc = 0.0;
    for (int i = 0; i < grid.n_interior(); ++i)
        acc += w[i] * (f.row(i).conjugate() * g.row(i).transpose())(0, 0);
    return acc;
}

inline Eigen::MatrixXcd gram_matrix(const OrthonormalSystem& sys) {
    const int n = sys.size();
    Eigen::MatrixXcd g(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            g(a, b) = system_inner_product(sys.grid, sys.functions[a], sys.functions[b]);
    return g;
}

inline double gram_defect(const OrthonormalSystem& sys) {
    if (sys.size() == 0) return 0.0;
    const Eigen::MatrixXcd g = gram_matrix(sys);
    return (g - Eigen::MatrixXcd::Identity(sys.size(), sys.size())).cwiseAbs().maxCoeff();
}

/// Modified Gram-Schmidt with one full re-orthogonalization pass.
inline OrthonormalSystem gram_schmidt(const Grid& grid,
                                      const std::vector<Eigen::MatrixXcd>& raw) {
    OrthonormalSystem sys;
    sys.grid = grid;
    sys.channels = raw.empty() ? 1 : static_cast<int>(raw.front().cols());
    for (const auto& r : raw) {
        if (r.rows() != grid.n_interior() || r.cols() != sys.channels)
            throw std::invalid_argument("gram_schmidt: inconsistent function dimensions");
        Eigen::MatrixXcd v = r;
        const double norm_before = std::sqrt(std::abs(system_inner_product(grid, v, v)));
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& q : sys.functions)
                v -= system_inner_product(grid, q, v) * q;
        const double norm_after = std::sqrt(std::abs(system_inner_product(grid, v, v)));
        if (!(norm_after > 1e-12 * std::max(norm_before, 1e-300)))
            throw RankDeficientError("gram_schmidt: numerically rank-deficient input");
        sys.functions.push_back(v / norm_after);
    }
    return sys;
}

inline KernelDiagonal kernel_diagonal(const OrthonormalSystem& sys) {
    KernelDiagonal k;
    k.grid = sys.grid;
    k.channels = sys.channels;
    const int n = sys.grid.n_interior();
    k.values.assign(n, Eigen::MatrixXcd::Zero(sys.channels, sys.channels));
    for (const auto& f : sys.functions)
        for (int i = 0; i < n; ++i) {
            const Eigen::VectorXcd c = f.row(i).transpose();
            k.values[i] += c * c.adjoint();
        }
    return k;
}

/// Max over sampled node pairs (x, z) of || int U(x,y) U(y,z) dy - U(x,z) ||_F.
/// For a projection kernel this collapses to the Gram defect propagated
/// through the function values.
inline double projection_defect(const OrthonormalSystem& sys, int pair_samples = 64,
                                std::uint64_t seed = 0) {
    const int n = sys.grid.n_interior();
    const int nf = sys.size();
    if (nf == 0) return 0.0;
    // int U(x_a, y) U(y, z_b) dy - U(x_a, z_b) = Phi_a (G - I) Phi_b^*
    const Eigen::MatrixXcd e =
        gram_matrix(sys) - Eigen::MatrixXcd::Identity(nf, nf);
    SplitRng rng = SplitRng(seed).split(0x70616972ULL);
    auto values_at = [&](int node) {
        Eigen::MatrixXcd phi(sys.channels, nf);
        for (int f = 0; f < nf; ++f) phi.col(f) = sys.functions[f].row(node).transpose();
        return phi;
    };
    double defect = 0.0;
    for (int s = 0; s < pair_samples; ++s) {
        const int a = static_cast<int>(rng.below(n));
        const int b = static_cast<int>(rng.below(n));
        defect = std::max(defect, (values_at(a) * e * values_at(b).adjoint()).norm());
    }
    return defect;
}

/// Left side of the matrix Sobolev inequality: int Tr[U(x,x)^3] dx.
inline double sobolev_lhs(const KernelDiagonal& k) {
    const int n = k.grid.n_interior();
    Eigen::VectorXd t(n);
    for (int i = 0; i < n; ++i) {
        const Eigen::MatrixXcd& u = k.values[i];
        t[i] = (u * u * u).trace().real();
    }
    return integrate(k.grid, t);
}

/// Right side: sum over functions and channels of int |phi'|^2 dx.
inline double kinetic_energy(const OrthonormalSystem& sys) {
    double acc = 0.0;
    for (const auto& f : sys.functions)
        for (int j = 0; j < sys.channels; ++j) {
            const Eigen::VectorXcd d = differentiate(sys.grid, f.col(j).eval());
            acc += integrate(sys.grid, d.cwiseAbs2().eval());
        }
    return acc;
}

struct SobolevReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
    bool pass = false;
    int system_size = 0;
    int channels = 1;
    double gram_defect = 0.0;
};

inline SobolevReport check_sobolev(const OrthonormalSystem& sys) {
    const double defect = gram_defect(sys);
    if (defect > 1e-8)
        throw std::invalid_argument("check_sobolev: system is not orthonormal (defect " +
                                    std::to_string(defect) + ")");
    SobolevReport r;
    r.lhs = sobolev_lhs(kernel_diagonal(sys));
    r.rhs = kinetic_energy(sys);
    r.slack = r.rhs - r.lhs;
    r.pass = r.lhs <= r.rhs + 1e-8 * (1.0 + r.rhs);
    r.system_size = sys.size();
    r.channels = sys.channels;
    r.gram_defect = defect;
    return r;
}

struct AgmonReport {
    double sup_sq = 0.0;
    double integral = 0.0;
    bool pass = false;
};

/// sup_i |f(x_i)|^2 <= int |f f'| dx, for a scalar grid function decaying at
/// the box ends.
inline AgmonReport agmon_check(const ComplexGridFunction& f) {
    AgmonReport r;
    r.sup_sq = f.values.cwiseAbs2().maxCoeff();
    const Eigen::VectorXcd d = differentiate(f.grid, f.values);
    r.integral = integrate(f.grid, (f.values.cwiseAbs().cwiseProduct(d.cwiseAbs())).eval());
    r.pass = r.sup_sq <= r.integral + 1e-6;
    return r;
}

inline AgmonReport agmon_check(const RealGridFunction& f) {
    return agmon_check(ComplexGridFunction{f.grid, f.values.cast<Complex>()});
}

/// Seeded generator: N random Gaussian-bump vector-functions orthonormalized
/// by gram_schmidt. Deterministic in (N, M, seed).
inline OrthonormalSystem random_orthonormal_system(const Grid& grid, int n_functions,
                                                   int channels, std::uint64_t seed) {
    if (n_functions < 0 || channels < 1)
        throw std::invalid_argument("random_orthonormal_system: bad N or M");
    SplitRng root = SplitRng(seed).split(0x6f6e73ULL);
    for (int attempt = 0; attempt < 3; ++attempt) {
        std::vector<Eigen::MatrixXcd> raw;
        raw.reserve(n_functions);
        SplitRng rng = root.split(attempt);
        for (int f = 0; f < n_functions; ++f) {
            Eigen::MatrixXcd fn = Eigen::MatrixXcd::Zero(grid.n_interior(), channels);
            for (int j = 0; j < channels; ++j)
                for (int bump = 0; bump < 2; ++bump) {
                    const double center = rng.uniform(-4.0, 4.0);
                    const double width = rng.uniform(0.7, 2.5);
                    const Complex amp(rng.normal(), rng.normal());
                    for (int i = 0; i < grid.n_interior(); ++i) {
                        const double u = (grid.node(i) - center) / width;
                        fn(i, j) += amp * std::exp(-0.5 * u * u);
                    }
                }
            raw.push_back(std::move(fn));
        }
        try {
            return gram_schmidt(grid, raw);
        } catch (const RankDeficientError&) {
            // resample; astronomically unlikely but cheap to guard
        }
    }
    throw RankDeficientError("random_orthonormal_system: could not build an independent set");
}

/// View the eigenvectors of a computed spectrum as an orthonormal system;
/// this is exactly the system appearing in the trace-inequality proof chain.
inline OrthonormalSystem as_orthonormal_system(const Spectrum& s, const Grid& grid) {
    if (!s.has_vectors())
        throw std::invalid_argument("as_orthonormal_system: spectrum has no eigenvectors");
    OrthonormalSystem sys;
    sys.grid = grid;
    sys.channels = static_cast<int>(s.vectors.front().cols());
    sys.functions = s.vectors;
    if (sys.functions.front().rows() != grid.n_interior())
        throw std::invalid_argument("as_orthonormal_system: grid does not match vectors");
    const double defect = gram_defect(sys);
    if (defect > 1e-8)
        throw ConsistencyFailure("as_orthonormal_system: eigenvectors not orthonormal (defect " +
                                 std::to_string(defect) + ")");
    return sys;
}

}  // namespace ltlab

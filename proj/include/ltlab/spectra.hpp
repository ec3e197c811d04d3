#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "ltlab/errors.hpp"
#include "ltlab/grid.hpp"
#include "ltlab/potentials.hpp"
#include "ltlab/rng.hpp"

namespace ltlab {

/// Finite-difference realization of H = -d^2/dx^2 - V(x) on the grid with
/// Dirichlet ends: a Hermitian block-tridiagonal matrix with diagonal blocks
/// (2/h^2) I - V(x_i) and constant off-diagonal blocks (-1/h^2) I.
struct DiscretizedOperator {
    Grid grid;
    int channels = 1;
    std::vector<Eigen::MatrixXcd> diag;  // n Hermitian M x M blocks
    double off = 0.0;                    // scalar off-diagonal coupling, -1/h^2

    Eigen::Index dimension() const {
        return static_cast<Eigen::Index>(grid.n_interior()) * channels;
    }

    /// Gershgorin bounds: every eigenvalue lies in [first, second].
    std::pair<double, double> gershgorin() const {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        const int m = channels;
        for (const auto& t : diag) {
            for (int r = 0; r < m; ++r) {
                double radius = 2.0 * std::abs(off);
                for (int c = 0; c < m; ++c)
                    if (c != r) radius += std::abs(t(r, c));
                lo = std::min(lo, t(r, r).real() - radius);
                hi = std::max(hi, t(r, r).real() + radius);
            }
        }
        return {lo, hi};
    }

    double norm_bound() const {
        auto [lo, hi] = gershgorin();
        return std::max(std::abs(lo), std::abs(hi));
    }

    /// y = H x for a node-major vector of length n*M.
    Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const {
        const int n = grid.n_interior();
        const int m = channels;
        Eigen::VectorXcd y(dimension());
        for (int i = 0; i < n; ++i) {
            auto seg = y.segment(i * m, m);
            seg = diag[i] * x.segment(i * m, m);
            if (i > 0) seg += off * x.segment((i - 1) * m, m);
            if (i + 1 < n) seg += off * x.segment((i + 1) * m, m);
        }
        return y;
    }

    /// Full matrix, for small cross-validation problems only.
    Eigen::MatrixXcd dense() const {
        const int n = grid.n_interior();
        const int m = channels;
        Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dimension(), dimension());
        for (int i = 0; i < n; ++i) {
            h.block(i * m, i * m, m, m) = diag[i];
            if (i + 1 < n) {
                h.block(i * m, (i + 1) * m, m, m) = off * Eigen::MatrixXcd::Identity(m, m);
                h.block((i + 1) * m, i * m, m, m) = off * Eigen::MatrixXcd::Identity(m, m);
            }
        }
        return h;
    }
};

inline DiscretizedOperator assemble(const MatrixPotentialField& field) {
    DiscretizedOperator op;
    op.grid = field.grid;
    op.channels = field.channels;
    const double h = field.grid.spacing();
    const double k = 2.0 / (h * h);
    op.off = -1.0 / (h * h);
    op.diag.reserve(field.samples.size());
    for (const auto& v : field.samples) {
        Eigen::MatrixXcd t = -0.5 * (v + v.adjoint().eval());  // exact Hermitian
        t.diagonal().array() += k;
        op.diag.push_back(std::move(t));
    }
    return op;
}

struct SpectrumMeta {
    double h = 0.0;
    double half_width = 0.0;
    double eps_cut = 0.0;
    bool richardson_applied = false;
    bool warning = false;  // refinement levels disagreed on the eigenvalue count
};

/// Negative part of the spectrum with per-eigenvalue error estimates and
/// (optionally) quadrature-normalized eigenvectors.
struct Spectrum {
    std::vector<double> negatives;          // ascending
    std::vector<double> error_estimates;    // same length
    std::vector<Eigen::MatrixXcd> vectors;  // optional; n x M samples per state
    SpectrumMeta meta;

    bool has_vectors() const { return !vectors.empty(); }
};

inline double riesz_mean(const Spectrum& s, double gamma) {
    if (!(gamma >= 0.0)) throw std::invalid_argument("riesz_mean: gamma must be >= 0");
    double acc = 0.0;
    for (double ev : s.negatives) acc += std::pow(std::abs(ev), gamma);
    return acc;
}

namespace detail {

// Hermitian LDL^* with diagonal pivoting and LAPACK-style clamping of tiny
// pivots. `w` is consumed (lower triangle + diagonal used); `inv` receives
// the inverse of the clamped factorization. Returns the number of negative
// pivots, which equals the number of negative eigenvalues of `w` by
// Sylvester's law of inertia (up to the clamping perturbation).
template <class Blk>
int ldl_inertia_inverse(Blk w, Blk& inv, int m, double pivmin) {
    std::array<int, 16> perm{};
    std::array<double, 16> d{};
    std::array<Complex, 16> l{};
    for (int k = 0; k < m; ++k) perm[k] = k;
    int neg = 0;
    for (int k = 0; k < m; ++k) {
        int p = k;
        for (int j = k + 1; j < m; ++j)
            if (std::abs(w(j, j).real()) > std::abs(w(p, p).real())) p = j;
        if (p != k) {
            w.row(k).swap(w.row(p));
            w.col(k).swap(w.col(p));
            std::swap(perm[k], perm[p]);
        }
        double piv = w(k, k).real();
        if (std::abs(piv) < pivmin) piv = -pivmin;
        if (piv < 0.0) ++neg;
        d[k] = piv;
        for (int i = k + 1; i < m; ++i) l[i] = w(i, k) / piv;
        for (int i = k + 1; i < m; ++i) {
            for (int j = k + 1; j <= i; ++j) {
                const Complex v = w(i, j) - l[i] * piv * std::conj(l[j]);
                w(i, j) = v;
                w(j, i) = std::conj(v);  // keep the trailing block fully Hermitian for swaps
            }
        }
        for (int i = k + 1; i < m; ++i) w(i, k) = l[i];
    }
    // inv = P^T L^{-*} D^{-1} L^{-1} P
    Blk y = Blk::Identity(m, m);
    for (int col = 0; col < m; ++col) {
        for (int i = 1; i < m; ++i) {
            Complex s = y(i, col);
            for (int k = 0; k < i; ++k) s -= w(i, k) * y(k, col);
            y(i, col) = s;
        }
    }
    for (int i = 0; i < m; ++i) y.row(i) /= d[i];
    for (int col = 0; col < m; ++col) {
        for (int i = m - 2; i >= 0; --i) {
            Complex s = y(i, col);
            for (int k = i + 1; k < m; ++k) s -= std::conj(w(k, i)) * y(k, col);
            y(i, col) = s;
        }
    }
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) inv(perm[i], perm[j]) = y(i, j);
    return neg;
}

/// Spectrum slicing for the Hermitian block-tridiagonal operator, built on
/// the Schur-complement recursion D_i = T_i - sigma I - c^2 D_{i-1}^{-1}.
/// The template parameter fixes the block size at compile time
/// (Eigen::Dynamic for M > 4).
template <int BM>
class BlockTridiagSolver {
public:
    using Blk = Eigen::Matrix<Complex, BM, BM>;

    explicit BlockTridiagSolver(const DiscretizedOperator& op)
        : n_(op.grid.n_interior()), m_(op.channels), c_(op.off), c2_(op.off * op.off) {
        diag_.reserve(n_);
        for (const auto& t : op.diag) diag_.push_back(Blk(t));
        norm_scale_ = std::max(1.0, op.norm_bound());
        pivmin_ = std::numeric_limits<double>::epsilon() * norm_scale_;
    }

    int size() const { return n_; }
    double norm_scale() const { return norm_scale_; }

    /// Number of eigenvalues strictly below sigma (modulo clamping ties).
    int count_below(double sigma) const {
        Blk dcur(m_, m_), inv(m_, m_);
        int count = 0;
        for (int i = 0; i < n_; ++i) {
            dcur = diag_[i];
            for (int r = 0; r < m_; ++r) dcur(r, r) -= sigma;
            if (i > 0) dcur -= c2_ * inv;
            count += ldl_inertia_inverse<Blk>(dcur, inv, m_, pivmin_);
        }
        return count;
    }

    /// Per-node Schur-complement inverses of H - sigma I, for the block-Thomas
    /// substitution in solve().
    void factor(double sigma, std::vector<Blk>& inv_store) const {
        inv_store.assign(n_, Blk::Zero(m_, m_));
        Blk dcur(m_, m_);
        for (int i = 0; i < n_; ++i) {
            dcur = diag_[i];
            for (int r = 0; r < m_; ++r) dcur(r, r) -= sigma;
            if (i > 0) dcur -= c2_ * inv_store[i - 1];
            ldl_inertia_inverse<Blk>(dcur, inv_store[i], m_, pivmin_);
        }
    }

    /// Solve (H - sigma I) x = b with factors from factor().
    Eigen::VectorXcd solve(const std::vector<Blk>& inv_store, const Eigen::VectorXcd& b) const {
        Eigen::VectorXcd y(b.size());
        y.segment(0, m_) = b.segment(0, m_);
        for (int i = 1; i < n_; ++i)
            y.segment(i * m_, m_) =
                b.segment(i * m_, m_) - c_ * (inv_store[i - 1] * y.segment((i - 1) * m_, m_));
        Eigen::VectorXcd x(b.size());
        x.segment((n_ - 1) * m_, m_) = inv_store[n_ - 1] * y.segment((n_ - 1) * m_, m_);
        for (int i = n_ - 2; i >= 0; --i)
            x.segment(i * m_, m_) =
                inv_store[i] * (y.segment(i * m_, m_) - c_ * x.segment((i + 1) * m_, m_)).eval();
        return x;
    }

private:
    int n_;
    int m_;
    double c_;
    double c2_;
    double norm_scale_;
    double pivmin_;
    std::vector<Blk> diag_;
};

struct BisectionOptions {
    double abs_tol = 1e-9;
    double rel_tol = 1e-10;
};

template <int BM>
std::vector<std::pair<double, double>> slice_below(const BlockTridiagSolver<BM>& solver,
                                                   const DiscretizedOperator& op, double upper,
                                                   const BisectionOptions& opt) {
    const int k_up = solver.count_below(upper);
    if (k_up == 0) return {};

    double lo = op.gershgorin().first - 1e-8 * solver.norm_scale() - 1.0;
    int k_lo = solver.count_below(lo);
    for (int guard = 0; k_lo > 0 && guard < 8; ++guard) {
        lo -= std::max(1.0, std::abs(lo));
        k_lo = solver.count_below(lo);
    }
    if (k_lo > 0) throw SolverFailure("slice_below: could not bracket the spectrum from below");

    const double eps = std::numeric_limits<double>::epsilon();
    std::vector<std::pair<double, double>> out;  // (value, half-width)
    struct Interval {
        double a, b;
        int ka, kb;
    };
    std::vector<Interval> work{{lo, upper, 0, k_up}};
    int inconsistent = 0;
    while (!work.empty()) {
        const Interval iv = work.back();
        work.pop_back();
        if (iv.kb <= iv.ka) continue;
        const double span = std::max(std::abs(iv.a), std::abs(iv.b));
        const double tol =
            std::max({opt.abs_tol, opt.rel_tol * span, 8.0 * eps * span});
        if (iv.b - iv.a <= tol) {
            const double mid = 0.5 * (iv.a + iv.b);
            for (int r = 0; r < iv.kb - iv.ka; ++r) out.emplace_back(mid, 0.5 * (iv.b - iv.a));
            continue;
        }
        const double mid = 0.5 * (iv.a + iv.b);
        int kc = solver.count_below(mid);
        if (kc < iv.ka || kc > iv.kb) {
            ++inconsistent;
            kc = std::clamp(kc, iv.ka, iv.kb);
        }
        work.push_back({iv.a, mid, iv.ka, kc});
        work.push_back({mid, iv.b, kc, iv.kb});
    }
    if (inconsistent > 4 + k_up)
        throw SolverFailure("slice_below: Sturm counts were not monotone");
    std::sort(out.begin(), out.end());
    return out;
}

// Inverse iteration in the style of LAPACK's dstein: one shift per
// eigenvalue, Gram-Schmidt against already-accepted neighbours, then a
// Rayleigh-Ritz rotation inside every group that bisection left unresolved
// (exact or near-exact multiplicities).
template <int BM>
std::vector<Eigen::VectorXcd> inverse_iteration(const BlockTridiagSolver<BM>& solver,
                                                const DiscretizedOperator& op,
                                                const std::vector<double>& eigenvalues) {
    using Blk = typename BlockTridiagSolver<BM>::Blk;
    const Eigen::Index dim = op.dimension();
    const double scale = solver.norm_scale();
    const double ortho_range = 1e-3 * std::max(1.0, 1e-6 * scale);
    const double res_tol = 1e-9 * scale;

    std::vector<Eigen::VectorXcd> vecs;
    vecs.reserve(eigenvalues.size());
    std::vector<Blk> factors;
    double factored_at = std::numeric_limits<double>::quiet_NaN();
    SplitRng rng(0x65696776ULL);

    for (std::size_t j = 0; j < eigenvalues.size(); ++j) {
        const double lambda = eigenvalues[j];
        auto orthogonalize = [&](Eigen::VectorXcd& x) {
            for (std::size_t i = 0; i < j; ++i)
                if (std::abs(eigenvalues[i] - lambda) <= ortho_range) x -= vecs[i].dot(x) * vecs[i];
        };
        Eigen::VectorXcd best;
        double best_res = std::numeric_limits<double>::infinity();
        for (int attempt = 0; attempt < 3 && best_res > res_tol; ++attempt) {
            double shift = lambda + scale * 1e-14 * attempt;
            if (shift != factored_at) {
                solver.factor(shift, factors);
                factored_at = shift;
            }
            SplitRng local = rng.split(j * 4 + attempt);
            Eigen::VectorXcd x(dim);
            for (Eigen::Index i = 0; i < dim; ++i) x[i] = Complex(local.normal(), local.normal());
            orthogonalize(x);
            x.normalize();
            for (int it = 0; it < 12 && best_res > res_tol; ++it) {
                Eigen::VectorXcd next = solver.solve(factors, x);
                if (!next.allFinite()) break;  // retry with a nudged shift
                orthogonalize(next);
                const double nrm = next.norm();
                if (nrm == 0.0) break;
                x = next / nrm;
                const double res = (op.apply(x) - lambda * x).norm();
                if (res < best_res) {
                    best_res = res;
                    best = x;
                }
            }
        }
        if (!(best_res <= res_tol))
            throw SolverFailure("inverse_iteration: no convergence at lambda = " +
                                std::to_string(lambda) + " (residual " +
                                std::to_string(best_res) + ")");
        vecs.push_back(std::move(best));
    }

    // Rayleigh-Ritz inside groups of (numerically) equal eigenvalues.
    std::size_t g = 0;
    while (g < eigenvalues.size()) {
        std::size_t e = g + 1;
        while (e < eigenvalues.size() &&
               std::abs(eigenvalues[e] - eigenvalues[g]) <= 1e2 * std::numeric_limits<double>::epsilon() * scale)
            ++e;
        if (e - g > 1) {
            const Eigen::Index mblk = static_cast<Eigen::Index>(e - g);
            Eigen::MatrixXcd xs(dim, mblk);
            for (std::size_t i = g; i < e; ++i) xs.col(i - g) = vecs[i];
            // re-orthonormalize, project H, rotate
            Eigen::HouseholderQR<Eigen::MatrixXcd> qr(xs);
            Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(dim, mblk);
            Eigen::MatrixXcd hx(dim, mblk);
            for (Eigen::Index c = 0; c < mblk; ++c) hx.col(c) = op.apply(q.col(c));
            Eigen::MatrixXcd small = q.adjoint() * hx;
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (small + small.adjoint()));
            Eigen::MatrixXcd rotated = q * es.eigenvectors();
            for (std::size_t i = g; i < e; ++i) vecs[i] = rotated.col(i - g);
        }
        g = e;
    }

    // deterministic phase: largest-magnitude entry real and positive
    for (auto& v : vecs) {
        Eigen::Index imax = 0;
        v.cwiseAbs().maxCoeff(&imax);
        const Complex z = v[imax];
        if (std::abs(z) > 0.0) v *= std::conj(z) / std::abs(z);
    }
    return vecs;
}

template <int BM>
Spectrum negative_eigenvalues_impl(const DiscretizedOperator& op, double eps_cut,
                                   bool want_vectors, const BisectionOptions& opt) {
    BlockTridiagSolver<BM> solver(op);
    const auto slices = slice_below(solver, op, -eps_cut, opt);
    Spectrum s;
    s.meta.h = op.grid.spacing();
    s.meta.half_width = op.grid.half_width();
    s.meta.eps_cut = eps_cut;
    for (const auto& [value, halfwidth] : slices) {
        s.negatives.push_back(value);
        s.error_estimates.push_back(halfwidth);
    }
    if (want_vectors && !s.negatives.empty()) {
        const auto raw = inverse_iteration(solver, op, s.negatives);
        const int n = op.grid.n_interior();
        const int m = op.channels;
        const Eigen::VectorXd w = op.grid.weights();
        for (const auto& v : raw) {
            Eigen::MatrixXcd f(n, m);
            for (int i = 0; i < n; ++i)
                for (int c = 0; c < m; ++c) f(i, c) = v[i * m + c];
            double nrm2 = 0.0;
            for (int i = 0; i < n; ++i) nrm2 += w[i] * f.row(i).squaredNorm();
            f /= std::sqrt(nrm2);
            s.vectors.push_back(std::move(f));
        }
    }
    return s;
}

template <class F>
auto dispatch_block_size(int m, F&& f) {
    switch (m) {
        case 1: return f(std::integral_constant<int, 1>{});
        case 2: return f(std::integral_constant<int, 2>{});
        case 3: return f(std::integral_constant<int, 3>{});
        case 4: return f(std::integral_constant<int, 4>{});
        default: return f(std::integral_constant<int, Eigen::Dynamic>{});
    }
}

}  // namespace detail

/// All eigenvalues of the discretized operator strictly below `upper`,
/// ascending, each bisected to the given tolerances. Multiple eigenvalues are
/// repeated according to multiplicity.
inline std::vector<double> eigenvalues_below(const DiscretizedOperator& op, double upper,
                                             double abs_tol = 1e-9, double rel_tol = 1e-10) {
    detail::BisectionOptions opt{abs_tol, rel_tol};
    return detail::dispatch_block_size(op.channels, [&](auto bm) {
        detail::BlockTridiagSolver<bm()> solver(op);
        const auto slices = detail::slice_below(solver, op, upper, opt);
        std::vector<double> out;
        out.reserve(slices.size());
        for (const auto& [value, halfwidth] : slices) out.push_back(value);
        return out;
    });
}

/// Eigenvalues below -eps_cut with error estimates; eigenvectors on request,
/// normalized in the grid's quadrature inner product.
inline Spectrum negative_eigenvalues(const DiscretizedOperator& op, double eps_cut = 1e-6,
                                     bool want_vectors = false) {
    if (!(eps_cut > 0.0)) throw std::invalid_argument("negative_eigenvalues: eps_cut must be > 0");
    detail::BisectionOptions opt;
    return detail::dispatch_block_size(op.channels, [&](auto bm) {
        return detail::negative_eigenvalues_impl<bm()>(op, eps_cut, want_vectors, opt);
    });
}

/// Two-level discretization control: solve at h and h/2, pair eigenvalues in
/// ascending order, Richardson-extrapolate with order 2, and keep only
/// eigenvalues whose membership below -eps_cut is stable across both levels.
/// Eigenvectors (on request) live on the finer grid.
inline Spectrum converged_spectrum(const PotentialSpec& spec, const Grid& grid,
                                   double eps_cut = 1e-6, bool want_vectors = false) {
    const Grid fine = grid.refined();
    const Spectrum coarse_s = negative_eigenvalues(assemble(sample(spec, grid)), eps_cut, false);
    Spectrum fine_s = negative_eigenvalues(assemble(sample(spec, fine)), eps_cut, want_vectors);

    Spectrum out;
    out.meta.h = grid.spacing();
    out.meta.half_width = grid.half_width();
    out.meta.eps_cut = eps_cut;
    out.meta.richardson_applied = true;
    out.meta.warning = coarse_s.negatives.size() != fine_s.negatives.size();

    const std::size_t paired = std::min(coarse_s.negatives.size(), fine_s.negatives.size());
    for (std::size_t i = 0; i < paired; ++i) {
        const double vh = coarse_s.negatives[i];
        const double vh2 = fine_s.negatives[i];
        const double extrapolated = richardson(vh, vh2, 2);
        if (!(extrapolated < -eps_cut) || !(vh < -eps_cut) || !(vh2 < -eps_cut)) {
            out.meta.warning = true;
            continue;
        }
        out.negatives.push_back(extrapolated);
        out.error_estimates.push_back(std::abs(vh - vh2));
        if (want_vectors && fine_s.has_vectors())
            out.vectors.push_back(std::move(fine_s.vectors[i]));
    }
    return out;
}

}  // namespace ltlab

#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "ltlab/constants.hpp"
#include "ltlab/grid.hpp"
#include "ltlab/potentials.hpp"
#include "ltlab/quadrature.hpp"
#include "ltlab/sobolev.hpp"
#include "ltlab/spectra.hpp"

namespace ltlab {

/// Both sides of a Lieb-Thirring style bound, with the verdict safeguarded by
/// the eigenvalue error estimates: a discretization artifact must never make
/// the inequality look violated.
struct LTReport {
    std::string spec_label;
    Json spec_json;
    int d = 1;
    double gamma = 1.0;
    double lhs = 0.0;           // sum |lambda_n|^gamma
    double rhs_integral = 0.0;  // int Tr[V^{d/2+gamma}]
    double constant = 0.0;      // bound constant in front of rhs_integral
    double ratio = 0.0;         // lhs / rhs_integral
    double error_sum = 0.0;     // first-order eigenvalue-error contribution to lhs
    bool pass = false;
    bool vacuous = false;  // no bound states below the cutoff
    SpectrumMeta spectrum_meta;
};

inline std::string spec_label(const PotentialSpec& spec) {
    std::ostringstream os;
    if (const auto* p = std::get_if<PoschlTeller>(&spec.family))
        os << "pt(s=" << p->s << ",b=" << p->b << ")";
    else if (const auto* p = std::get_if<SquareWell>(&spec.family))
        os << "well(d=" << p->depth << ",w=" << p->width << ")";
    else if (const auto* p = std::get_if<GaussianWell>(&spec.family))
        os << "gauss(a=" << p->amplitude << ",w=" << p->width << ",c=" << p->center << ")";
    else if (const auto* p = std::get_if<MatrixDiagonal>(&spec.family))
        os << "diag(" << p->blocks.size() << " blocks)";
    else if (std::get_if<MatrixConjugated>(&spec.family))
        os << "conjugated(M=" << channel_count(spec) << ")";
    else if (const auto* p = std::get_if<MatrixGaussianMix>(&spec.family))
        os << "mix(M=" << channel_count(spec) << ",K=" << p->terms.size() << ")";
    else
        os << "custom(M=" << channel_count(spec) << ")";
    return os.str();
}

namespace detail {

inline void finish_lt_report(LTReport& r) {
    r.ratio = r.rhs_integral > 0.0 ? r.lhs / r.rhs_integral : 0.0;
    if (r.rhs_integral <= 0.0) {
        r.vacuous = r.lhs == 0.0;
        r.pass = r.vacuous;
        return;
    }
    r.pass = (r.lhs - r.error_sum) <= r.constant * r.rhs_integral * (1.0 + 1e-6);
}

}  // namespace detail

/// One-dimensional bound at Riesz exponent gamma >= 1. At gamma = 1 the
/// constant is 2/(3 sqrt 3); for gamma > 1 the lifted constant
/// ratio_r * lt_classical(1, gamma) is used.
inline LTReport check_lt_1d(const PotentialSpec& spec, const Grid& grid, double gamma = 1.0,
                            double eps_cut = 1e-6) {
    if (!(gamma >= 1.0)) throw std::invalid_argument("check_lt_1d: gamma must be >= 1");
    LTReport r;
    r.spec_label = spec_label(spec);
    r.spec_json = to_json(spec);
    r.d = 1;
    r.gamma = gamma;
    r.constant = (gamma == 1.0) ? named_constants().c_thm1 : lt_table_entry(1, gamma).bound;

    const Spectrum s = converged_spectrum(spec, grid, eps_cut, false);
    r.spectrum_meta = s.meta;
    r.lhs = riesz_mean(s, gamma);
    for (std::size_t i = 0; i < s.negatives.size(); ++i)
        r.error_sum += gamma * std::pow(std::abs(s.negatives[i]), gamma - 1.0) *
                       s.error_estimates[i];
    r.rhs_integral = trace_power_integral(sample(spec, grid), 0.5 + gamma);
    r.vacuous = s.negatives.empty();
    detail::finish_lt_report(r);
    return r;
}

inline LTReport check_theorem1(const PotentialSpec& spec, const Grid& grid,
                               double eps_cut = 1e-6) {
    return check_lt_1d(spec, grid, 1.0, eps_cut);
}

struct HolderReport {
    double lhs = 0.0;  // int Tr[V U(x,x)]
    double rhs = 0.0;  // (int Tr V^{3/2})^{2/3} (int Tr U^3)^{1/3}
    bool pass = false;
    bool vacuous = false;
};

/// Trace Hoelder step of the proof chain, evaluated on the eigenvector
/// projection kernel of the potential's own bound states.
inline HolderReport check_holder_step(const PotentialSpec& spec, const Grid& grid,
                                      double eps_cut = 1e-6) {
    HolderReport r;
    const MatrixPotentialField field = sample(spec, grid);
    const Spectrum s = negative_eigenvalues(assemble(field), eps_cut, true);
    if (s.negatives.empty()) {
        r.vacuous = true;
        r.pass = true;
        return r;
    }
    const OrthonormalSystem sys = as_orthonormal_system(s, grid);
    const KernelDiagonal u = kernel_diagonal(sys);
    const int n = grid.n_interior();
    Eigen::VectorXd t(n);
    for (int i = 0; i < n; ++i) t[i] = (field.samples[i] * u.values[i]).trace().real();
    r.lhs = integrate(grid, t);
    r.rhs = std::pow(trace_power_integral(field, 1.5), 2.0 / 3.0) *
            std::pow(sobolev_lhs(u), 1.0 / 3.0);
    r.pass = r.lhs <= r.rhs * (1.0 + 1e-8);
    return r;
}

struct EnergyIdentityReport {
    double sum_lambda = 0.0;
    double kinetic = 0.0;
    double potential_trace = 0.0;
    double residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::vector<double> state_residuals;  // per-state diagnostics at the fine level
};

/// Trace identity sum lambda_n = sum int |phi_n'|^2 - int Tr[V U]; evaluated
/// at h and h/2 and Richardson-extrapolated term by term. Validates solver,
/// quadrature and kernel assembly jointly; throws ConsistencyFailure when the
/// extrapolated residual exceeds tolerance.
inline EnergyIdentityReport check_energy_identity(const PotentialSpec& spec, const Grid& grid,
                                                  double eps_cut = 1e-6) {
    struct Level {
        double sum_lambda = 0.0, kinetic = 0.0, potential = 0.0;
        std::vector<double> lambdas, kinetics, potentials;
    };
    auto eval_level = [&](const Grid& g) {
        Level lv;
        const MatrixPotentialField field = sample(spec, g);
        const Spectrum s = negative_eigenvalues(assemble(field), eps_cut, true);
        const int n = g.n_interior();
        for (std::size_t k = 0; k < s.negatives.size(); ++k) {
            const Eigen::MatrixXcd& f = s.vectors[k];
            double kin = 0.0;
            for (int j = 0; j < field.channels; ++j) {
                const Eigen::VectorXcd d = differentiate(g, f.col(j).eval());
                kin += integrate(g, d.cwiseAbs2().eval());
            }
            Eigen::VectorXd pt(n);
            for (int i = 0; i < n; ++i)
                pt[i] = (f.row(i).conjugate() * field.samples[i] * f.row(i).transpose())(0, 0)
                            .real();
            lv.lambdas.push_back(s.negatives[k]);
            lv.kinetics.push_back(kin);
            lv.potentials.push_back(integrate(g, pt));
        }
        return lv;
    };

    Level coarse = eval_level(grid);
    Level fine = eval_level(grid.refined());
    const std::size_t paired = std::min(coarse.lambdas.size(), fine.lambdas.size());
    for (std::size_t k = 0; k < paired; ++k) {
        coarse.sum_lambda += coarse.lambdas[k];
        coarse.kinetic += coarse.kinetics[k];
        coarse.potential += coarse.potentials[k];
        fine.sum_lambda += fine.lambdas[k];
        fine.kinetic += fine.kinetics[k];
        fine.potential += fine.potentials[k];
    }

    EnergyIdentityReport r;
    r.sum_lambda = richardson(coarse.sum_lambda, fine.sum_lambda, 2);
    r.kinetic = richardson(coarse.kinetic, fine.kinetic, 2);
    r.potential_trace = richardson(coarse.potential, fine.potential, 2);
    r.residual = std::abs(r.sum_lambda - (r.kinetic - r.potential_trace));
    r.tolerance = 1e-5 * (1.0 + std::abs(r.sum_lambda));
    for (std::size_t k = 0; k < paired; ++k)
        r.state_residuals.push_back(
            std::abs(fine.lambdas[k] - (fine.kinetics[k] - fine.potentials[k])));
    r.pass = r.residual <= r.tolerance;
    if (!r.pass) {
        std::ostringstream os;
        os << "check_energy_identity: residual " << r.residual << " > tolerance " << r.tolerance
           << "; per-state residuals:";
        for (double sr : r.state_residuals) os << ' ' << sr;
        throw ConsistencyFailure(os.str());
    }
    return r;
}

/// Two-dimensional bound for a separable potential V(x,y) = v1(x) + v2(y) on
/// the product box, verified against the exact tensor-sum spectrum of the two
/// 1D Dirichlet problems. Both 1D spectra keep every box level up to
/// E_max = 4 max(depth1, depth2), which covers every pair that can sum below
/// the cutoff.
inline LTReport check_theorem2_separable(const PotentialSpec& spec1, const PotentialSpec& spec2,
                                         double gamma, const Grid& grid, double eps_cut = 1e-6) {
    if (!(gamma >= 1.0))
        throw std::invalid_argument("check_theorem2_separable: gamma must be >= 1");
    if (!is_scalar_family(spec1) || !is_scalar_family(spec2))
        throw std::invalid_argument("check_theorem2_separable: factors must be scalar potentials");

    LTReport r;
    r.spec_label = spec_label(spec1) + " + " + spec_label(spec2);
    r.spec_json = Json::array({to_json(spec1), to_json(spec2)});
    r.d = 2;
    r.gamma = gamma;
    r.constant = lt_table_entry(2, gamma).bound;

    const MatrixPotentialField f1 = sample(spec1, grid);
    const MatrixPotentialField f2 = sample(spec2, grid);
    const double depth = std::max(max_spectral_norm(f1), max_spectral_norm(f2));
    const double e_max = 4.0 * depth;

    // Richardson-extrapolated full 1D spectra below e_max, paired by index.
    auto levels_of = [&](const PotentialSpec& spec) {
        const auto coarse = eigenvalues_below(assemble(sample(spec, grid)), e_max);
        const auto fine = eigenvalues_below(assemble(sample(spec, grid.refined())), e_max);
        if (coarse.size() > 20000)
            throw ResolutionError("check_theorem2_separable: box spectrum too large to retain");
        std::vector<std::pair<double, double>> out;  // (value, error estimate)
        const std::size_t paired = std::min(coarse.size(), fine.size());
        for (std::size_t i = 0; i < paired; ++i)
            out.emplace_back(richardson(coarse[i], fine[i], 2), std::abs(coarse[i] - fine[i]));
        return out;
    };
    const auto lv1 = levels_of(spec1);
    const auto lv2 = levels_of(spec2);
    if (depth > 0.0) {
        auto covered = [&](const std::vector<std::pair<double, double>>& lv) {
            // complete if every partner below the depth scale is retained;
            // a box whose first level exceeds the depth cannot contribute
            const double largest = lv.empty() ? -std::numeric_limits<double>::infinity()
                                              : lv.back().first;
            const double first_box = M_PI * M_PI / (4.0 * grid.half_width() * grid.half_width());
            return largest >= depth || first_box > depth;
        };
        if (!covered(lv1) || !covered(lv2))
            throw ResolutionError("check_theorem2_separable: 1D spectra truncated below the "
                                  "depth scale");
    }

    for (const auto& [la, ea] : lv1)
        for (const auto& [lb, eb] : lv2) {
            const double sum = la + lb;
            if (sum < -eps_cut) {
                r.lhs += std::pow(-sum, gamma);
                r.error_sum += gamma * std::pow(-sum, gamma - 1.0) * (ea + eb);
            }
        }

    // product-Simpson quadrature of (v1(x) + v2(y))^{1+gamma} over the box
    const Eigen::VectorXd w = grid.weights();
    const int n = grid.n_interior();
    Eigen::VectorXd v1(n), v2(n);
    for (int i = 0; i < n; ++i) {
        v1[i] = f1.samples[i](0, 0).real();
        v2[i] = f2.samples[i](0, 0).real();
    }
    double rhs = 0.0;
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int j = 0; j < n; ++j) row += w[j] * std::pow(v1[i] + v2[j], 1.0 + gamma);
        rhs += w[i] * row;
    }
    r.rhs_integral = rhs;
    r.vacuous = r.lhs == 0.0;
    r.spectrum_meta.h = grid.spacing();
    r.spectrum_meta.half_width = grid.half_width();
    r.spectrum_meta.eps_cut = eps_cut;
    r.spectrum_meta.richardson_applied = true;
    detail::finish_lt_report(r);
    return r;
}

struct IdentityReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double rel_error = 0.0;
    bool pass = false;
};

/// Beta-integral identity behind the exponent lifting:
///   |lambda|^gamma = B(gamma - sigma, sigma + 1)^{-1}
///                    int_0^{|lambda|} t^{gamma-sigma-1} (|lambda| - t)^sigma dt.
inline IdentityReport al_eigenvalue_identity(double lambda, double gamma, double sigma) {
    if (!(lambda < 0.0))
        throw std::invalid_argument("al_eigenvalue_identity: lambda must be negative");
    if (!(sigma >= 1.0) || !(gamma > sigma))
        throw std::invalid_argument("al_eigenvalue_identity: need sigma >= 1 and gamma > sigma");
    const double mag = -lambda;
    // t = u^k regularizes the t^{gamma-sigma-1} endpoint
    const double k = std::max(2.0, 2.0 / (gamma - sigma));
    const double integral =
        adaptive_simpson(
            [&](double u) {
                const double t = std::pow(u, k);
                return k * std::pow(u, k * (gamma - sigma) - 1.0) *
                       std::pow(std::max(mag - t, 0.0), sigma);
            },
            0.0, std::pow(mag, 1.0 / k), 1e-13 * std::max(1.0, std::pow(mag, gamma)));
    IdentityReport r;
    r.lhs = std::pow(mag, gamma);
    r.rhs = integral / beta_function(gamma - sigma, sigma + 1.0);
    r.rel_error = std::abs(r.lhs - r.rhs) / std::abs(r.lhs);
    r.pass = r.rel_error <= 1e-8;
    return r;
}

/// The same lifting on the potential side (Fubini over the coupling):
///   int_0^inf t^{gamma-2} int (V - t)_+^{3/2} dx dt
///     = B(gamma - 1, 5/2) int V^{gamma + 1/2} dx.
inline IdentityReport al_potential_identity(const PotentialSpec& spec, double gamma,
                                            const Grid& grid) {
    if (!(gamma > 1.0))
        throw std::invalid_argument("al_potential_identity: gamma must be > 1");
    if (!is_scalar_family(spec))
        throw std::invalid_argument("al_potential_identity: scalar potentials only");
    const double half_width = grid.half_width();
    const auto breaks = scalar_breakpoints(spec);
    double vmax = 0.0;
    for (int i = 0; i < grid.n_interior(); ++i)
        vmax = std::max(vmax, scalar_value(spec, grid.node(i)));

    IdentityReport r;
    if (vmax == 0.0) {
        r.pass = true;
        return r;
    }
    auto slice = [&](double t) {
        return adaptive_simpson_split(
            [&](double x) {
                return std::pow(std::max(scalar_value(spec, x) - t, 0.0), 1.5);
            },
            -half_width, half_width, breaks, 1e-12 * std::max(1.0, std::pow(vmax, 1.5)));
    };
    const double k = std::max(2.0, 2.0 / (gamma - 1.0));
    r.lhs = adaptive_simpson(
        [&](double u) {
            const double t = std::pow(u, k);
            return k * std::pow(u, k * (gamma - 1.0) - 1.0) * slice(t);
        },
        0.0, std::pow(vmax, 1.0 / k), 1e-10 * std::max(1.0, std::pow(vmax, gamma + 0.5)), 24);
    r.rhs = beta_function(gamma - 1.0, 2.5) *
            adaptive_simpson_split(
                [&](double x) { return std::pow(scalar_value(spec, x), gamma + 0.5); },
                -half_width, half_width, breaks, 1e-13 * std::max(1.0, std::pow(vmax, gamma + 0.5)));
    r.rel_error = std::abs(r.lhs - r.rhs) / std::max(std::abs(r.rhs), 1e-300);
    r.pass = r.rel_error <= 1e-6;
    return r;
}

// ---- JSON -------------------------------------------------------------------

inline Json to_json(const SpectrumMeta& m) {
    Json j;
    j["h"] = m.h;
    j["L"] = m.half_width;
    j["eps_cut"] = m.eps_cut;
    j["richardson_applied"] = m.richardson_applied;
    j["warning"] = m.warning;
    return j;
}

inline Json to_json(const Spectrum& s) {
    Json j;
    j["negatives"] = s.negatives;
    j["error_estimates"] = s.error_estimates;
    j["meta"] = to_json(s.meta);
    return j;
}

inline Json to_json(const LTReport& r) {
    Json j;
    j["spec"] = r.spec_label;
    j["d"] = r.d;
    j["gamma"] = r.gamma;
    j["lhs"] = r.lhs;
    j["rhs"] = r.rhs_integral;
    j["constant"] = r.constant;
    j["ratio"] = r.ratio;
    j["pass"] = r.pass;
    j["vacuous"] = r.vacuous;
    j["error_sum"] = r.error_sum;
    j["spec_json"] = r.spec_json;
    j["meta"] = to_json(r.spectrum_meta);
    return j;
}

inline Json to_json(const SobolevReport& r) {
    Json j;
    j["lhs"] = r.lhs;
    j["rhs"] = r.rhs;
    j["slack"] = r.slack;
    j["pass"] = r.pass;
    Json meta;
    meta["N"] = r.system_size;
    meta["M"] = r.channels;
    meta["gram_defect"] = r.gram_defect;
    j["meta"] = std::move(meta);
    return j;
}

inline Json to_json(const AgmonReport& r) {
    Json j;
    j["sup_sq"] = r.sup_sq;
    j["integral"] = r.integral;
    j["pass"] = r.pass;
    return j;
}

}  // namespace ltlab

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "ltlab/errors.hpp"
#include "ltlab/grid.hpp"
#include "ltlab/rng.hpp"

namespace ltlab {

using Json = nlohmann::ordered_json;

/// Node-wise samples of a Hermitian PSD matrix potential V(x) on a grid.
struct MatrixPotentialField {
    Grid grid;
    int channels = 1;
    std::vector<Eigen::MatrixXcd> samples;  // one M x M matrix per interior node

    static constexpr double kHermTol = 1e-12;
    static constexpr double kPsdTol = -1e-10;
};

inline double hermiticity_defect(const MatrixPotentialField& field) {
    double defect = 0.0;
    for (const auto& s : field.samples)
        defect = std::max(defect, (s - s.adjoint().eval()).cwiseAbs().maxCoeff());
    return defect;
}

inline double min_node_eigenvalue(const MatrixPotentialField& field) {
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& s : field.samples) {
        if (field.channels == 1) {
            lo = std::min(lo, s(0, 0).real());
        } else {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(s, Eigen::EigenvaluesOnly);
            lo = std::min(lo, es.eigenvalues()[0]);
        }
    }
    return lo;
}

/// Largest node spectral norm; the depth scale of the potential.
inline double max_spectral_norm(const MatrixPotentialField& field) {
    double hi = 0.0;
    for (const auto& s : field.samples) {
        if (field.channels == 1) {
            hi = std::max(hi, std::abs(s(0, 0).real()));
        } else {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(s, Eigen::EigenvaluesOnly);
            hi = std::max(hi, std::max(std::abs(es.eigenvalues()[0]),
                                       std::abs(es.eigenvalues()[field.channels - 1])));
        }
    }
    return hi;
}

struct PotentialSpec;

// Potential families. All parameters are validated by the factory helpers so
// that every sampled matrix comes out Hermitian positive semidefinite.
struct PoschlTeller {
    double s = 1.0;  // strength; bound states at -b^2 (s-k)^2 for 0 <= k < s
    double b = 1.0;  // inverse length scale
};

struct SquareWell {
    double depth = 1.0;
    double width = 1.0;  // full width, centered at 0
};

struct GaussianWell {
    double amplitude = 1.0;
    double width = 1.0;
    double center = 0.0;
};

struct MatrixDiagonal {
    std::vector<PotentialSpec> blocks;
};

struct MatrixConjugated {
    std::vector<PotentialSpec> base;  // exactly one entry
    Eigen::MatrixXcd unitary;
};

struct GaussianMixTerm {
    Eigen::MatrixXcd weight;  // Hermitian PSD
    double center = 0.0;
    double width = 1.0;
};

struct MatrixGaussianMix {
    std::vector<GaussianMixTerm> terms;
};

struct CustomSampled {
    std::shared_ptr<const MatrixPotentialField> field;
};

struct PotentialSpec {
    std::variant<PoschlTeller, SquareWell, GaussianWell, MatrixDiagonal, MatrixConjugated,
                 MatrixGaussianMix, CustomSampled>
        family;
};

inline int channel_count(const PotentialSpec& spec);

namespace detail {
struct ChannelCounter {
    int operator()(const PoschlTeller&) const { return 1; }
    int operator()(const SquareWell&) const { return 1; }
    int operator()(const GaussianWell&) const { return 1; }
    int operator()(const MatrixDiagonal& d) const {
        int m = 0;
        for (const auto& b : d.blocks) m += channel_count(b);
        return m;
    }
    int operator()(const MatrixConjugated& c) const { return channel_count(c.base.front()); }
    int operator()(const MatrixGaussianMix& g) const {
        return static_cast<int>(g.terms.front().weight.rows());
    }
    int operator()(const CustomSampled& c) const { return c.field->channels; }
};
}  // namespace detail

inline int channel_count(const PotentialSpec& spec) {
    return std::visit(detail::ChannelCounter{}, spec.family);
}

// ---- factory helpers -------------------------------------------------------

inline PotentialSpec poschl_teller(double s, double b = 1.0) {
    if (!(s > 0.0) || !(b > 0.0))
        throw std::invalid_argument("poschl_teller: s and b must be positive");
    return {PoschlTeller{s, b}};
}

inline PotentialSpec square_well(double depth, double width) {
    if (!(depth >= 0.0) || !(width > 0.0))
        throw std::invalid_argument("square_well: depth >= 0 and width > 0 required");
    return {SquareWell{depth, width}};
}

inline PotentialSpec gaussian_well(double amplitude, double width, double center = 0.0) {
    if (!(amplitude >= 0.0) || !(width > 0.0))
        throw std::invalid_argument("gaussian_well: amplitude >= 0 and width > 0 required");
    return {GaussianWell{amplitude, width, center}};
}

inline PotentialSpec matrix_diagonal(std::vector<PotentialSpec> blocks) {
    if (blocks.empty()) throw std::invalid_argument("matrix_diagonal: no blocks");
    return {MatrixDiagonal{std::move(blocks)}};
}

inline PotentialSpec matrix_conjugated(PotentialSpec base, Eigen::MatrixXcd unitary) {
    const int m = channel_count(base);
    if (unitary.rows() != m || unitary.cols() != m)
        throw std::invalid_argument("matrix_conjugated: unitary has wrong dimensions");
    const double defect =
        (unitary.adjoint() * unitary - Eigen::MatrixXcd::Identity(m, m)).cwiseAbs().maxCoeff();
    if (defect > 1e-10) throw std::invalid_argument("matrix_conjugated: matrix is not unitary");
    MatrixConjugated c;
    c.base.push_back(std::move(base));
    c.unitary = std::move(unitary);
    return {std::move(c)};
}

inline PotentialSpec matrix_gaussian_mix(std::vector<GaussianMixTerm> terms) {
    if (terms.empty()) throw std::invalid_argument("matrix_gaussian_mix: no terms");
    const auto m = terms.front().weight.rows();
    for (const auto& t : terms) {
        if (t.weight.rows() != m || t.weight.cols() != m)
            throw std::invalid_argument("matrix_gaussian_mix: inconsistent weight dimensions");
        if (!(t.width > 0.0)) throw std::invalid_argument("matrix_gaussian_mix: width must be positive");
        if ((t.weight - t.weight.adjoint().eval()).cwiseAbs().maxCoeff() > 1e-10)
            throw std::invalid_argument("matrix_gaussian_mix: weight not Hermitian");
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(t.weight, Eigen::EigenvaluesOnly);
        if (es.eigenvalues()[0] < -1e-10 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff()))
            throw std::invalid_argument("matrix_gaussian_mix: weight not PSD");
    }
    return {MatrixGaussianMix{std::move(terms)}};
}

inline PotentialSpec custom_sampled(MatrixPotentialField field) {
    if (hermiticity_defect(field) > MatrixPotentialField::kHermTol)
        throw std::invalid_argument("custom_sampled: samples not Hermitian");
    if (min_node_eigenvalue(field) < MatrixPotentialField::kPsdTol)
        throw NotPsdError("custom_sampled: samples not positive semidefinite");
    return {CustomSampled{std::make_shared<const MatrixPotentialField>(std::move(field))}};
}

// ---- scalar evaluation (M == 1 families) -----------------------------------

inline bool is_scalar_family(const PotentialSpec& spec) {
    return std::holds_alternative<PoschlTeller>(spec.family) ||
           std::holds_alternative<SquareWell>(spec.family) ||
           std::holds_alternative<GaussianWell>(spec.family);
}

/// Point evaluation for scalar families; used by the quadrature-side checks.
inline double scalar_value(const PotentialSpec& spec, double x) {
    if (const auto* pt = std::get_if<PoschlTeller>(&spec.family)) {
        const double c = std::cosh(pt->b * x);
        return pt->s * (pt->s + 1.0) * pt->b * pt->b / (c * c);
    }
    if (const auto* sw = std::get_if<SquareWell>(&spec.family))
        return std::abs(x) < 0.5 * sw->width ? sw->depth : 0.0;
    if (const auto* gw = std::get_if<GaussianWell>(&spec.family)) {
        const double u = (x - gw->center) / gw->width;
        return gw->amplitude * std::exp(-0.5 * u * u);
    }
    throw std::invalid_argument("scalar_value: not a scalar potential family");
}

/// Kink/jump locations of scalar families, for breakpoint-aware quadrature.
inline std::vector<double> scalar_breakpoints(const PotentialSpec& spec) {
    if (const auto* sw = std::get_if<SquareWell>(&spec.family))
        return {-0.5 * sw->width, 0.5 * sw->width};
    return {};
}

// ---- sampling ---------------------------------------------------------------

namespace detail {

inline void sample_into(const PotentialSpec& spec, const Grid& grid,
                        std::vector<Eigen::MatrixXcd>& out, int offset);

struct Sampler {
    const Grid& grid;
    std::vector<Eigen::MatrixXcd>& out;
    int offset;

    void scalar(const PotentialSpec& spec) const {
        for (int i = 0; i < grid.n_interior(); ++i)
            out[i](offset, offset) = scalar_value(spec, grid.node(i));
    }

    void operator()(const PoschlTeller& p) const { scalar({p}); }
    void operator()(const SquareWell& p) const { scalar({p}); }
    void operator()(const GaussianWell& p) const { scalar({p}); }

    void operator()(const MatrixDiagonal& d) const {
        int off = offset;
        for (const auto& b : d.blocks) {
            sample_into(b, grid, out, off);
            off += channel_count(b);
        }
    }

    void operator()(const MatrixConjugated& c) const {
        const int m = static_cast<int>(c.unitary.rows());
        std::vector<Eigen::MatrixXcd> base(grid.n_interior(),
                                           Eigen::MatrixXcd::Zero(m, m));
        sample_into(c.base.front(), grid, base, 0);
        for (int i = 0; i < grid.n_interior(); ++i)
            out[i].block(offset, offset, m, m) = c.unitary.adjoint() * base[i] * c.unitary;
    }

    void operator()(const MatrixGaussianMix& g) const {
        const int m = static_cast<int>(g.terms.front().weight.rows());
        for (int i = 0; i < grid.n_interior(); ++i) {
            const double x = grid.node(i);
            Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(m, m);
            for (const auto& t : g.terms) {
                const double u = (x - t.center) / t.width;
                acc += std::exp(-0.5 * u * u) * t.weight;
            }
            out[i].block(offset, offset, m, m) = acc;
        }
    }

    void operator()(const CustomSampled& c) const {
        if (!(c.field->grid == grid))
            throw std::invalid_argument("custom_sampled: grid mismatch");
        const int m = c.field->channels;
        for (int i = 0; i < grid.n_interior(); ++i)
            out[i].block(offset, offset, m, m) = c.field->samples[i];
    }
};

inline void sample_into(const PotentialSpec& spec, const Grid& grid,
                        std::vector<Eigen::MatrixXcd>& out, int offset) {
    std::visit(Sampler{grid, out, offset}, spec.family);
}

}  // namespace detail

/// Evaluate the potential on the grid nodes. Hermiticity is enforced exactly
/// by symmetrization; positive semidefiniteness is verified afterwards.
inline MatrixPotentialField sample(const PotentialSpec& spec, const Grid& grid) {
    const int m = channel_count(spec);
    MatrixPotentialField field{grid, m,
                               std::vector<Eigen::MatrixXcd>(
                                   grid.n_interior(), Eigen::MatrixXcd::Zero(m, m))};
    detail::sample_into(spec, grid, field.samples, 0);
    for (auto& s : field.samples) s = 0.5 * (s + s.adjoint().eval());
    if (min_node_eigenvalue(field) < MatrixPotentialField::kPsdTol)
        throw NotPsdError("sample: potential is not positive semidefinite");
    return field;
}

/// Integral of Tr[V(x)^p] over the box, via node-wise Hermitian
/// eigendecomposition. Requires V PSD for fractional p.
inline double trace_power_integral(const MatrixPotentialField& field, double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("trace_power_integral: p must be >= 1");
    const int n = field.grid.n_interior();
    Eigen::VectorXd t(n);
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        if (field.channels == 1) {
            const double mu = field.samples[i](0, 0).real();
            if (mu < MatrixPotentialField::kPsdTol)
                throw NotPsdError("trace_power_integral: negative node value");
            acc = std::pow(std::max(mu, 0.0), p);
        } else {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(field.samples[i],
                                                               Eigen::EigenvaluesOnly);
            for (int j = 0; j < field.channels; ++j) {
                const double mu = es.eigenvalues()[j];
                if (mu < MatrixPotentialField::kPsdTol)
                    throw NotPsdError("trace_power_integral: negative node eigenvalue");
                acc += std::pow(std::max(mu, 0.0), p);
            }
        }
        t[i] = acc;
    }
    return integrate(field.grid, t);
}

// ---- seeded generators ------------------------------------------------------

/// Haar-ish random unitary from the QR factorization of a complex Gaussian.
inline Eigen::MatrixXcd random_unitary(int m, SplitRng rng) {
    Eigen::MatrixXcd a(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) a(i, j) = Complex(rng.normal(), rng.normal());
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
    Eigen::MatrixXcd q = qr.householderQ();
    const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < m; ++j) {
        const Complex d = r(j, j);
        if (std::abs(d) > 0.0) q.col(j) *= d / std::abs(d);
    }
    return q;
}

/// Random Hermitian-PSD Gaussian mix: K bumps with weights B_k = A_k A_k^*
/// rescaled to a spectral norm in (0, 10], centers in [-5, 5], widths in
/// [0.5, 3]. Deterministic for a given seed.
inline PotentialSpec random_psd_potential(int channels, int bumps, std::uint64_t seed) {
    if (channels < 1 || bumps < 1)
        throw std::invalid_argument("random_psd_potential: need channels >= 1 and bumps >= 1");
    SplitRng rng = SplitRng(seed).split(0x706f74ULL);
    std::vector<GaussianMixTerm> terms;
    terms.reserve(bumps);
    for (int k = 0; k < bumps; ++k) {
        Eigen::MatrixXcd a(channels, channels);
        for (int i = 0; i < channels; ++i)
            for (int j = 0; j < channels; ++j) a(i, j) = Complex(rng.normal(), rng.normal());
        Eigen::MatrixXcd b = a * a.adjoint();
        b = 0.5 * (b + b.adjoint().eval());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(b, Eigen::EigenvaluesOnly);
        const double norm = es.eigenvalues()[channels - 1];
        const double amplitude = rng.uniform(0.5, 10.0);
        if (norm > 0.0) b *= amplitude / norm;
        GaussianMixTerm t;
        t.weight = std::move(b);
        t.center = rng.uniform(-5.0, 5.0);
        t.width = rng.uniform(0.5, 3.0);
        terms.push_back(std::move(t));
    }
    return matrix_gaussian_mix(std::move(terms));
}

// ---- JSON serialization -----------------------------------------------------

namespace detail {

inline Json matrix_to_json(const Eigen::MatrixXcd& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            row.push_back(Json::array({m(i, j).real(), m(i, j).imag()}));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Eigen::MatrixXcd matrix_from_json(const Json& j) {
    const auto rows = j.size();
    if (rows == 0) throw std::invalid_argument("matrix_from_json: empty matrix");
    const auto cols = j.at(0).size();
    Eigen::MatrixXcd m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t k = 0; k < cols; ++k)
            m(i, k) = Complex(j.at(i).at(k).at(0).get<double>(),
                              j.at(i).at(k).at(1).get<double>());
    return m;
}

}  // namespace detail

inline Json to_json(const PotentialSpec& spec) {
    Json j;
    Json params = Json::object();
    if (const auto* p = std::get_if<PoschlTeller>(&spec.family)) {
        j["family"] = "poschl_teller";
        params["s"] = p->s;
        params["b"] = p->b;
    } else if (const auto* p = std::get_if<SquareWell>(&spec.family)) {
        j["family"] = "square_well";
        params["depth"] = p->depth;
        params["width"] = p->width;
    } else if (const auto* p = std::get_if<GaussianWell>(&spec.family)) {
        j["family"] = "gaussian_well";
        params["amplitude"] = p->amplitude;
        params["width"] = p->width;
        params["center"] = p->center;
    } else if (const auto* p = std::get_if<MatrixDiagonal>(&spec.family)) {
        j["family"] = "matrix_diagonal";
        Json blocks = Json::array();
        for (const auto& b : p->blocks) blocks.push_back(to_json(b));
        params["blocks"] = std::move(blocks);
    } else if (const auto* p = std::get_if<MatrixConjugated>(&spec.family)) {
        j["family"] = "matrix_conjugated";
        params["base"] = to_json(p->base.front());
        params["unitary"] = detail::matrix_to_json(p->unitary);
    } else if (const auto* p = std::get_if<MatrixGaussianMix>(&spec.family)) {
        j["family"] = "matrix_gaussian_mix";
        Json terms = Json::array();
        for (const auto& t : p->terms) {
            Json term;
            term["weight"] = detail::matrix_to_json(t.weight);
            term["center"] = t.center;
            term["width"] = t.width;
            terms.push_back(std::move(term));
        }
        params["terms"] = std::move(terms);
    } else if (const auto* p = std::get_if<CustomSampled>(&spec.family)) {
        j["family"] = "custom_sampled";
        params["L"] = p->field->grid.half_width();
        params["n_interior"] = p->field->grid.n_interior();
        Json samples = Json::array();
        for (const auto& s : p->field->samples) samples.push_back(detail::matrix_to_json(s));
        params["samples"] = std::move(samples);
    }
    j["params"] = std::move(params);
    j["M"] = channel_count(spec);
    return j;
}

inline PotentialSpec spec_from_json(const Json& j) {
    const std::string family = j.at("family").get<std::string>();
    const Json& p = j.at("params");
    if (family == "poschl_teller")
        return poschl_teller(p.at("s").get<double>(), p.at("b").get<double>());
    if (family == "square_well")
        return square_well(p.at("depth").get<double>(), p.at("width").get<double>());
    if (family == "gaussian_well")
        return gaussian_well(p.at("amplitude").get<double>(), p.at("width").get<double>(),
                             p.at("center").get<double>());
    if (family == "matrix_diagonal") {
        std::vector<PotentialSpec> blocks;
        for (const auto& b : p.at("blocks")) blocks.push_back(spec_from_json(b));
        return matrix_diagonal(std::move(blocks));
    }
    if (family == "matrix_conjugated")
        return matrix_conjugated(spec_from_json(p.at("base")),
                                 detail::matrix_from_json(p.at("unitary")));
    if (family == "matrix_gaussian_mix") {
        std::vector<GaussianMixTerm> terms;
        for (const auto& t : p.at("terms")) {
            GaussianMixTerm term;
            term.weight = detail::matrix_from_json(t.at("weight"));
            term.center = t.at("center").get<double>();
            term.width = t.at("width").get<double>();
            terms.push_back(std::move(term));
        }
        return matrix_gaussian_mix(std::move(terms));
    }
    if (family == "custom_sampled") {
        MatrixPotentialField field;
        field.grid = make_grid(p.at("L").get<double>(), p.at("n_interior").get<int>());
        const Json& samples = p.at("samples");
        field.samples.reserve(samples.size());
        for (const auto& s : samples) field.samples.push_back(detail::matrix_from_json(s));
        field.channels = static_cast<int>(field.samples.front().rows());
        return custom_sampled(std::move(field));
    }
    throw std::invalid_argument("spec_from_json: unknown potential family '" + family + "'");
}

}  // namespace ltlab

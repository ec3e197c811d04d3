#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ltlab/sobolev.hpp"

using namespace ltlab;

namespace {

Eigen::MatrixXcd gaussian_column(const Grid& g, double width = 1.0, double center = 0.0) {
    Eigen::MatrixXcd f(g.n_interior(), 1);
    for (int i = 0; i < g.n_interior(); ++i) {
        const double u = (g.node(i) - center) / width;
        f(i, 0) = std::exp(-0.5 * u * u);
    }
    return f;
}

}  // namespace

TEST_CASE("gram_schmidt: already orthonormal input unchanged") {
    Grid g = make_grid(10.0, 999);
    auto sys = gram_schmidt(g, {gaussian_column(g)});
    auto sys2 = gram_schmidt(g, sys.functions);
    CHECK(gram_defect(sys2) <= 1e-12);
    CHECK((sys.functions[0] - sys2.functions[0]).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("gram_schmidt: identical functions are rank deficient") {
    Grid g = make_grid(10.0, 499);
    auto f = gaussian_column(g);
    CHECK_THROWS_AS(gram_schmidt(g, {f, f}), RankDeficientError);
}

TEST_CASE("gram_schmidt: random bump system reaches 1e-10 Gram defect") {
    Grid g = make_grid(12.0, 1199);
    auto sys = random_orthonormal_system(g, 5, 2, 3);
    CHECK(sys.size() == 5);
    CHECK(sys.channels == 2);
    CHECK(gram_defect(sys) <= 1e-10);
}

TEST_CASE("kernel_diagonal of a normalized Gaussian peaks at 1/sqrt(pi)") {
    Grid g = make_grid(10.0, 1999);
    auto sys = gram_schmidt(g, {gaussian_column(g)});
    auto k = kernel_diagonal(sys);
    const int mid = g.n_interior() / 2;
    CHECK(k.values[mid](0, 0).real() == doctest::Approx(0.5641895835477563).epsilon(1e-8));

    // trace of the kernel integrates to N
    Eigen::VectorXd tr(g.n_interior());
    for (int i = 0; i < g.n_interior(); ++i) tr[i] = k.values[i].trace().real();
    CHECK(integrate(g, tr) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("kernel_diagonal: empty system and single-channel support") {
    Grid g = make_grid(8.0, 199);
    OrthonormalSystem empty{g, 1, {}};
    auto k0 = kernel_diagonal(empty);
    for (const auto& u : k0.values) CHECK(u.cwiseAbs().maxCoeff() == 0.0);

    // function supported in channel 1 only
    Eigen::MatrixXcd f = Eigen::MatrixXcd::Zero(g.n_interior(), 2);
    f.col(0) = gaussian_column(g).col(0);
    auto sys = gram_schmidt(g, {f});
    auto k = kernel_diagonal(sys);
    const int mid = g.n_interior() / 2;
    CHECK(k.values[mid](0, 0).real() > 0.1);
    CHECK(std::abs(k.values[mid](0, 1)) == 0.0);
    CHECK(std::abs(k.values[mid](1, 1)) == 0.0);
}

TEST_CASE("trace of kernel integrates to N for a larger system") {
    Grid g = make_grid(14.0, 1399);
    auto sys = random_orthonormal_system(g, 7, 3, 9);
    auto k = kernel_diagonal(sys);
    Eigen::VectorXd tr(g.n_interior());
    for (int i = 0; i < g.n_interior(); ++i) tr[i] = k.values[i].trace().real();
    CHECK(integrate(g, tr) == doctest::Approx(7.0).epsilon(1e-8));
}

TEST_CASE("projection_defect detects broken orthonormality") {
    Grid g = make_grid(10.0, 999);
    auto sys = random_orthonormal_system(g, 4, 2, 17);
    CHECK(projection_defect(sys) <= 1e-8);

    OrthonormalSystem scaled = sys;
    for (auto& f : scaled.functions) f *= 0.9;
    CHECK(projection_defect(scaled) > 1e-3);

    auto single = gram_schmidt(g, {gaussian_column(g)});
    CHECK(projection_defect(single) <= 1e-8);
}

TEST_CASE("sobolev_lhs of the normalized Gaussian") {
    Grid g = make_grid(10.0, 1999);
    auto sys = gram_schmidt(g, {gaussian_column(g)});
    const double expected = 0.18377629847393068;  // 1/(pi sqrt(3))
    CHECK(sobolev_lhs(kernel_diagonal(sys)) == doctest::Approx(expected).epsilon(1e-8));

    // two decoupled copies double the trace
    Eigen::MatrixXcd f1 = Eigen::MatrixXcd::Zero(g.n_interior(), 2);
    Eigen::MatrixXcd f2 = Eigen::MatrixXcd::Zero(g.n_interior(), 2);
    f1.col(0) = gaussian_column(g).col(0);
    f2.col(1) = gaussian_column(g).col(0);
    auto two = gram_schmidt(g, {f1, f2});
    CHECK(sobolev_lhs(kernel_diagonal(two)) == doctest::Approx(2.0 * expected).epsilon(1e-8));
}

TEST_CASE("kinetic_energy of the normalized Gaussian and its dilation") {
    Grid g = make_grid(10.0, 9999);
    auto sys = gram_schmidt(g, {gaussian_column(g)});
    CHECK(kinetic_energy(sys) == doctest::Approx(0.5).epsilon(1e-6));

    const double b = 2.0;
    Grid gb = make_grid(10.0 / b, 9999);
    auto sysb = gram_schmidt(gb, {gaussian_column(gb, 1.0 / b)});
    CHECK(kinetic_energy(sysb) == doctest::Approx(0.5 * b * b).epsilon(1e-5));
}

TEST_CASE("check_sobolev: Gaussian case and dilation sweep") {
    Grid g = make_grid(10.0, 9999);
    auto r = check_sobolev(gram_schmidt(g, {gaussian_column(g)}));
    CHECK(r.pass);
    CHECK(r.lhs == doctest::Approx(0.183776).epsilon(1e-4));
    CHECK(r.rhs == doctest::Approx(0.5).epsilon(1e-4));

    // both sides scale as b^2: the slack ratio is dilation invariant
    for (double b : {0.1, 0.5, 2.0, 10.0}) {
        const double half_width = 8.0 * std::max(1.0, 1.0 / b);
        const int n = 2 * static_cast<int>(half_width / std::min(0.005, 0.005 / b)) - 1;
        Grid gb = make_grid(half_width, n);
        auto rb = check_sobolev(gram_schmidt(gb, {gaussian_column(gb, 1.0 / b)}));
        CHECK(rb.pass);
        CHECK(rb.lhs / rb.rhs == doctest::Approx(r.lhs / r.rhs).epsilon(1e-5));
    }
}

TEST_CASE("check_sobolev holds on random systems") {
    Grid g = make_grid(12.0, 1199);
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const int n_fun = 1 + static_cast<int>(seed % 8);
        const int m = 1 + static_cast<int>(seed % 3);
        auto r = check_sobolev(random_orthonormal_system(g, n_fun, m, seed));
        CHECK(r.pass);
        CHECK(r.slack > 0.0);
    }
}

TEST_CASE("check_sobolev is invariant under channel rotation") {
    Grid g = make_grid(10.0, 999);
    auto sys = random_orthonormal_system(g, 4, 3, 23);
    auto w = random_unitary(3, SplitRng(5));
    OrthonormalSystem rotated = sys;
    for (auto& f : rotated.functions) f = (f * w.transpose()).eval();
    auto r0 = check_sobolev(sys);
    auto r1 = check_sobolev(rotated);
    CHECK(r1.lhs == doctest::Approx(r0.lhs).epsilon(1e-10));
    CHECK(r1.rhs == doctest::Approx(r0.rhs).epsilon(1e-10));
}

TEST_CASE("check_sobolev on eigenvector systems of test potentials") {
    Grid g = make_grid(20.0, 1999);
    auto s = negative_eigenvalues(assemble(sample(poschl_teller(2.0), g)), 1e-6, true);
    auto sys = as_orthonormal_system(s, g);
    auto r = check_sobolev(sys);
    CHECK(r.pass);

    auto sm = negative_eigenvalues(assemble(sample(random_psd_potential(2, 2, 31), g)), 1e-6, true);
    auto rm = check_sobolev(as_orthonormal_system(sm, g));
    CHECK(rm.pass);
}

TEST_CASE("agmon_check: Gaussian and sech equality cases, zero function") {
    Grid g = make_grid(10.0, 19999);  // h = 0.001
    const double peak = 0.5641895835477563;
    auto phi = gram_schmidt(g, {gaussian_column(g)});
    auto r = agmon_check(ComplexGridFunction{g, phi.functions[0].col(0)});
    CHECK(r.pass);
    CHECK(r.sup_sq == doctest::Approx(peak).epsilon(2e-6));
    CHECK(r.integral == doctest::Approx(peak).epsilon(2e-6));

    Grid gs = make_grid(20.0, 39999);
    auto sech_f = sample_function(gs, [](double x) { return 1.0 / std::cosh(x); });
    auto rs = agmon_check(sech_f);
    CHECK(rs.pass);
    CHECK(rs.sup_sq == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(rs.integral == doctest::Approx(1.0).epsilon(1e-5));

    auto zero = sample_function(gs, [](double) { return 0.0; });
    auto rz = agmon_check(zero);
    CHECK(rz.pass);
    CHECK(rz.sup_sq == 0.0);
    CHECK(rz.integral == 0.0);
}

TEST_CASE("check_sobolev rejects non-orthonormal input") {
    Grid g = make_grid(8.0, 399);
    auto sys = gram_schmidt(g, {gaussian_column(g)});
    for (auto& f : sys.functions) f *= 0.9;
    CHECK_THROWS_AS(check_sobolev(sys), std::invalid_argument);
}

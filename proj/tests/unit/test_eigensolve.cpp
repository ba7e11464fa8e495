#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dense.hpp"

#include "dnstrip/eigensolve.hpp"
#include "dnstrip/errors.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <numbers>

using namespace dnstrip;
using std::numbers::pi;

namespace {

/// Two uncoupled copies of a pencil, interleaved so the band width doubles.
GeneralizedPencil doubled(const GeneralizedPencil& p) {
    const std::size_t n = p.size(), bw = p.half_bandwidth();
    GeneralizedPencil d{SymBandMatrix(2 * n, 2 * bw), SymBandMatrix(2 * n, 2 * bw), p.meta};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i >= bw ? i - bw : 0; j <= i; ++j)
            for (std::size_t c = 0; c < 2; ++c) {
                d.A.add(2 * i + c, 2 * j + c, p.A(i, j));
                d.M.add(2 * i + c, 2 * j + c, p.M(i, j));
            }
    d.meta.trial.clear();
    for (double v : p.meta.trial) {
        d.meta.trial.push_back(v);
        d.meta.trial.push_back(v);
    }
    return d;
}

/// ||A_a^-1 M - A_b^-1 M|| in the M inner product, densely.
double dense_gap(const GeneralizedPencil& a, const GeneralizedPencil& b) {
    const Eigen::MatrixXd M = testing::dense(a.M);
    const Eigen::MatrixXd L = Eigen::LLT<Eigen::MatrixXd>(M).matrixL();
    const Eigen::MatrixXd D = testing::dense(a.A).inverse() - testing::dense(b.A).inverse();
    const Eigen::MatrixXd S = L.transpose() * D * L;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

} // namespace

TEST_CASE("smallest eigenvalues of a 1D pencil match a dense solver") {
    const auto p = assemble_1d([](double s) { return 10 * std::sin(3 * s); }, make_interval(0, 2), 150);
    const auto dense = testing::dense_eigenvalues(p);
    const Spectrum s = smallest_eigenpairs(p, 5);
    REQUIRE(s.eigenvalues.size() == 5);
    for (int j = 0; j < 5; ++j) {
        CHECK(s.eigenvalues[j] == doctest::Approx(dense[j]).epsilon(1e-9));
        CHECK(s.converged[j]);
        CHECK(s.residuals[j] <= s.tolerance[j]);
        CHECK(s.tolerance[j] >= 1e-8);
    }
    CHECK(s.sigma < s.eigenvalues[0]);
}

TEST_CASE("eigenvectors are M-orthonormal with small residuals") {
    const auto p = assemble_weighted(parse_profile("negcos", make_interval(-pi, pi)), 0.1, {},
                                     build_grid(make_interval(-pi, pi), 32, 4));
    EigenOptions o;
    o.keep_vectors = true;
    const Spectrum s = smallest_eigenpairs(p, 4, o);
    REQUIRE(s.eigenvectors.size() == 4);
    const std::size_t n = p.size();
    std::vector<double> Ax(n), Mx(n), My(n);
    for (int i = 0; i < 4; ++i) {
        const auto& x = s.eigenvectors[i];
        p.A.multiply(x, Ax);
        p.M.multiply(x, Mx);
        double r2 = 0;
        for (std::size_t k = 0; k < n; ++k) r2 += std::pow(Ax[k] - s.eigenvalues[i] * Mx[k], 2);
        CHECK(std::sqrt(r2) / std::abs(s.eigenvalues[i]) < 1e-5);
        for (int j = 0; j < 4; ++j) {
            p.M.multiply(s.eigenvectors[j], My);
            CHECK(dot(x, My) == doctest::Approx(i == j ? 1.0 : 0.0).scale(1.0).epsilon(1e-10));
        }
    }
    const auto dense = testing::dense_eigenvalues(p);
    for (int j = 0; j < 4; ++j) CHECK(s.eigenvalues[j] == doctest::Approx(dense[j]).epsilon(1e-9));
}

TEST_CASE("repeated eigenvalues are returned with multiplicity") {
    const auto p = assemble_1d([](double) { return 0.0; }, make_interval(0, 1), 80);
    const auto dense = testing::dense_eigenvalues(p);
    const Spectrum s = smallest_eigenpairs(doubled(p), 6);
    REQUIRE(s.eigenvalues.size() == 6);
    for (int j = 0; j < 6; ++j) CHECK(s.eigenvalues[j] == doctest::Approx(dense[j / 2]).epsilon(1e-9));
}

TEST_CASE("explicit shift and input validation") {
    const auto p = assemble_1d([](double) { return 0.0; }, make_interval(0, 1), 60);
    EigenOptions o;
    o.sigma = 5.0;
    const Spectrum s = smallest_eigenpairs(p, 2, o);
    CHECK(s.eigenvalues[0] == doctest::Approx(pi * pi).epsilon(1e-3));
    CHECK_THROWS_AS(smallest_eigenpairs(p, 0), InvalidInput);
    CHECK_THROWS_AS(smallest_eigenpairs(p, 100), InvalidInput);
}

TEST_CASE("resolvent gap norm") {
    const Interval I = make_interval(0, 1);
    const auto a = assemble_1d([](double) { return 1.0; }, I, 40);
    const auto b = assemble_1d([](double s) { return 1.0 + 30 * s * s; }, I, 40);
    CHECK(operator_gap_norm(a, a) <= 1e-12);
    const double ab = operator_gap_norm(a, b), ba = operator_gap_norm(b, a);
    const double ref = dense_gap(a, b);
    CHECK(ab == doctest::Approx(ref).epsilon(1e-6));
    CHECK(ba == doctest::Approx(ab).epsilon(1e-6));

    const auto other_mass = assemble_1d([](double) { return 1.0; }, I, 41);
    CHECK_THROWS_AS(operator_gap_norm(a, other_mass), InvalidInput);
    const auto indefinite = assemble_1d([](double) { return -100.0; }, I, 40);
    CHECK_THROWS_AS(operator_gap_norm(a, indefinite), NumericalFailure);
}

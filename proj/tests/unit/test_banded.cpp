#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dense.hpp"

#include "dnstrip/eigensolve.hpp"
#include "dnstrip/errors.hpp"

#include <random>

using namespace dnstrip;

namespace {

SymBandMatrix random_band(std::size_t n, std::size_t bw, double diagonal, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    SymBandMatrix m(n, bw);
    for (std::size_t i = 0; i < n; ++i) {
        m.add(i, i, diagonal + u(rng));
        for (std::size_t j = i >= bw ? i - bw : 0; j < i; ++j) m.add(i, j, u(rng));
    }
    return m;
}

GeneralizedPencil pencil_of(SymBandMatrix A) {
    SymBandMatrix M(A.size(), A.half_bandwidth());
    for (std::size_t i = 0; i < A.size(); ++i) M.add(i, i, 1.0);
    return {std::move(A), std::move(M), {}};
}

} // namespace

TEST_CASE("band storage is symmetric and zero outside the band") {
    SymBandMatrix m(5, 2);
    m.add(3, 1, 2.0);
    m.add(1, 3, 0.5);
    CHECK(m(3, 1) == 2.5);
    CHECK(m(1, 3) == 2.5);
    CHECK(m(4, 0) == 0.0);
    CHECK(m.max_abs() == 2.5);
}

TEST_CASE("multiply matches dense") {
    const SymBandMatrix m = random_band(30, 4, 3.0, 1);
    std::vector<double> x(30), y(30);
    for (int i = 0; i < 30; ++i) x[i] = std::sin(i + 1.0);
    m.multiply(x, y);
    const Eigen::VectorXd ref = testing::dense(m) * Eigen::Map<Eigen::VectorXd>(x.data(), 30);
    for (int i = 0; i < 30; ++i) CHECK(y[i] == doctest::Approx(ref(i)).epsilon(1e-13));
}

TEST_CASE("LDLT reconstructs and solves") {
    const SymBandMatrix K = random_band(40, 3, 2.0, 7);
    const auto f = BandedFactorization::factor(K);
    for (std::size_t i = 0; i < 40; ++i)
        for (std::size_t j = 0; j < 40; ++j)
            CHECK(f.reconstruct(i, j) == doctest::Approx(K(i, j)).epsilon(1e-12).scale(1.0));

    std::vector<double> x_true(40), b(40);
    for (int i = 0; i < 40; ++i) x_true[i] = std::cos(0.3 * i);
    K.multiply(x_true, b);
    f.solve(b);
    for (int i = 0; i < 40; ++i) CHECK(b[i] == doctest::Approx(x_true[i]).epsilon(1e-10));
}

TEST_CASE("inertia equals the dense eigenvalue count") {
    const SymBandMatrix A = random_band(50, 5, 0.0, 11);
    const GeneralizedPencil p = pencil_of(A);
    const auto ev = testing::dense_eigenvalues(p);
    for (double tau : {-2.0, -0.5, 0.0, 0.7, 3.0}) {
        const auto expected = static_cast<std::size_t>(std::count_if(ev.begin(), ev.end(), [&](double v) { return v < tau; }));
        CHECK(count_below(p, tau) == expected);
    }
}

TEST_CASE("shift at an exact eigenvalue is singular") {
    SymBandMatrix A(3, 1);
    A.add(0, 0, 1.0);
    A.add(1, 1, 2.0);
    A.add(2, 2, 3.0);
    const GeneralizedPencil p = pencil_of(A);
    CHECK_THROWS_AS(ldlt_banded(p, 2.0), SingularShift);
    try {
        ldlt_banded(p, 2.0);
    } catch (const SingularShift& e) {
        CHECK(e.pivot() == 1);
    }
    const auto f = ldlt_banded(p, 2.5);
    CHECK(f.negative_pivots() == 2);
    CHECK(f.shift() == 2.5);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dnstrip/analysis.hpp"
#include "dnstrip/errors.hpp"

#include <cmath>
#include <numbers>

using namespace dnstrip;
using std::numbers::pi;

namespace {

/// J0 from its power series, accurate to round-off for |x| < 5.
double j0_series(double x) {
    double term = 1.0, sum = 1.0;
    const double q = -x * x / 4;
    for (int k = 1; k < 60; ++k) {
        term *= q / (static_cast<double>(k) * k);
        sum += term;
    }
    return sum;
}

double j0_zero_by_bisection() {
    double lo = 2.0, hi = 3.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (j0_series(mid) > 0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

TEST_CASE("richardson extrapolation of a quadratic error") {
    const double exact = 3.0, c = 0.8;
    const std::vector<std::vector<double>> three = {{exact + c}, {exact + c / 4}, {exact + c / 16}};
    const Extrapolated e3 = richardson(three);
    CHECK(e3.value[0] == doctest::Approx(exact).epsilon(1e-14));
    CHECK(e3.error[0] <= 1e-14);
    const Extrapolated e2 = richardson({three[0], three[1]});
    CHECK(e2.value[0] == doctest::Approx(exact).epsilon(1e-14));
    CHECK(e2.error[0] == doctest::Approx(0.75 * c / 3));
    const double d = 0.64;
    const Extrapolated e4 = richardson({{exact + d}, {exact + d / 16}, {exact + d / 256}});
    CHECK(e4.value[0] == doctest::Approx(exact - d / 64).epsilon(1e-14));
    CHECK(e4.error[0] == doctest::Approx(15 * d / 64).epsilon(1e-12));
    CHECK_THROWS_AS(richardson({three[0]}), InvalidInput);
}

TEST_CASE("sqrt fit and log-log slope recover synthetic data") {
    const std::vector<double> eps = {0.2, 0.1, 0.05, 0.025};
    std::vector<double> y;
    for (double e : eps) y.push_back(-1.0 + 0.7 * std::sqrt(e));
    const LimitFit f = fit_sqrt_limit(eps, y, std::vector<double>(4, 0.0));
    CHECK(f.limit == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(f.slope == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(f.points == 3);
    std::vector<double> g;
    for (double e : eps) g.push_back(2.5 * std::pow(e, 1.5));
    CHECK(loglog_slope(eps, g) == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("effective 1D spectrum") {
    const Interval I = make_interval(0, 1);
    const Extrapolated free = effective_spectrum([](double) { return 0.0; }, I, 3, 256);
    for (int j = 0; j < 3; ++j) {
        CHECK(free.value[j] == doctest::Approx(std::pow((j + 1) * pi, 2)).epsilon(1e-8));
        CHECK(free.error[j] < 1e-6 * free.value[j]);
    }
    const Extrapolated shifted = effective_spectrum([](double) { return -4.0; }, I, 2, 256);
    CHECK(shifted.value[0] == doctest::Approx(pi * pi - 4).epsilon(1e-8));

    const Interval J = make_interval(-pi, pi);
    const Extrapolated well = effective_spectrum([](double s) { return -std::cos(s) / 0.01; }, J, 1, 1024);
    CHECK(well.value[0] == doctest::Approx(-100 + std::sqrt(50.0)).epsilon(0.2 / 93));
}

TEST_CASE("transverse eigenvalue") {
    CHECK(transverse_nu(0.0) == doctest::Approx(pi * pi / 4).epsilon(1e-9));
    CHECK(transverse_nu(0.1) == doctest::Approx(2.574376452609).epsilon(1e-8));
    const double lo = transverse_nu(-0.1), mid = transverse_nu(0.05);
    CHECK(lo == doctest::Approx(pi * pi / 4 - 0.1).epsilon(0.02));
    CHECK(lo < pi * pi / 4);
    CHECK(mid > pi * pi / 4);
    CHECK_THROWS_AS(transverse_nu(1.0), InvalidInput);
}

TEST_CASE("bessel zero against an independent series") {
    CHECK(std::abs(bessel_j0_first_zero() - j0_zero_by_bisection()) < 1e-12);
    CHECK(std::abs(bessel_j0_first_zero() - 2.404825557695773) < 1e-9);
}

TEST_CASE("annulus oracle approaches the straight strip for large radius") {
    const double eps = 0.1, R = 400.0, L = 1.0;
    const auto v = annulus_oracle(R, eps, L / R, AnnulusSide::DirichletOuter, 2);
    REQUIRE(v.size() == 2);
    const double straight = std::pow(pi / (2 * eps), 2) + pi * pi;
    CHECK(v[0] == doctest::Approx(straight).epsilon(0.01 / straight * 10));
    CHECK(v[1] > v[0]);
    CHECK_THROWS_AS(annulus_oracle(0.05, 0.1, pi, AnnulusSide::DirichletOuter, 1), InvalidInput);
}

TEST_CASE("straight strip sweep has a vanishing remainder") {
    const auto z = parse_profile("zero", make_interval(0, 1));
    SweepSettings s;
    s.eps_list = {0.2, 0.1};
    s.j_max = 2;
    s.grids = {32, 4, 3};
    s.ns_1d = 256;
    s.truncation_check = false;
    const auto records = run_sweep(z, BoundaryConditionSet::dirichlet_neumann(), s);
    REQUIRE(records.size() == 2);
    for (const auto& r : records) {
        CHECK(r.threshold == doctest::Approx(std::pow(pi / (2 * r.eps), 2)));
        for (int j = 0; j < 2; ++j) {
            CHECK(std::abs(r.remainder_thm2[j]) < 1e-4);
            CHECK(r.lambda_1d[j] == doctest::Approx(std::pow((j + 1) * pi, 2)).epsilon(1e-6));
        }
        CHECK(r.grid == "32x4/3");
    }
    s.eps_list = {0.1, 0.2};
    CHECK_THROWS_WITH_AS(run_sweep(z, {}, s), "eps_list must be decreasing", InvalidInput);
}

TEST_CASE("robin with zero coefficient reproduces the DN spectrum") {
    const auto g = parse_profile("gaussian_dip:1,0,1", make_interval(-6, 6, true));
    const TensorGrid grid = build_grid(g.interval, 32, 4);
    const Spectrum dn = strip_spectrum({g, 0.1}, grid, 2);
    const Spectrum rb =
        strip_spectrum({g, 0.1, BoundaryConditionSet::dirichlet_robin([](double) { return 0.0; })}, grid, 2);
    CHECK(dn.eigenvalues == rb.eigenvalues);
}

TEST_CASE("bound states") {
    const GridSpec grids{32, 4, 2};
    const auto z = parse_profile("zero", make_interval(-3, 3, true));
    CHECK(count_bound_states({z, 0.1}, grids).count == 0);
    const auto g = parse_profile("gaussian_dip:1,0,1", make_interval(-6, 6, true));
    const BoundStateCount c = count_bound_states({g, 0.1}, grids);
    CHECK(c.count >= 1);
    CHECK(c.doubled_count == c.count);
    CHECK(c.lambda1 < c.threshold);
    CHECK(c.threshold == doctest::Approx(std::pow(pi / 0.2, 2)));
}

TEST_CASE("default shift") {
    CHECK(default_shift_k(parse_profile("zero", make_interval(0, 1))) == 1.0);
    CHECK(default_shift_k(parse_profile("gaussian_dip:1,0,1", make_interval(-6, 6, true))) ==
          doctest::Approx(3.0).epsilon(1e-6));
}

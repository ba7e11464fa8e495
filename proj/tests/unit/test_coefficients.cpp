#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dnstrip/coefficients.hpp"
#include "dnstrip/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>

using namespace dnstrip;
using std::numbers::pi;

namespace {

double integrate01(auto f) {
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, 1.0, 10, 1e-13);
}

} // namespace

TEST_CASE("thresholds") {
    CHECK(transverse_threshold(BoundaryVariant::DN, 0.1) == doctest::Approx(std::pow(pi / 0.2, 2)));
    CHECK(transverse_threshold(BoundaryVariant::Robin, 0.1) == doctest::Approx(std::pow(pi / 0.2, 2)));
    CHECK(transverse_threshold(BoundaryVariant::Dirichlet, 0.1) == doctest::Approx(std::pow(pi / 0.1, 2)));
}

TEST_CASE("transverse mode is a normalized DN eigenfunction") {
    CHECK(transverse_mode(0.0) == 0.0);
    CHECK(integrate01([](double t) { return transverse_mode(t) * transverse_mode(t); }) == doctest::Approx(1.0));
    const double d = 1e-5;
    const double slope_at_one = (transverse_mode(1.0) - transverse_mode(1.0 - d)) / d;
    CHECK(std::abs(slope_at_one) < 1e-4);
    const double t = 0.37;
    const double second = (transverse_mode(t + d) - 2 * transverse_mode(t) + transverse_mode(t - d)) / (d * d);
    CHECK(-second == doctest::Approx(pi * pi / 4 * transverse_mode(t)).epsilon(1e-4));
}

TEST_CASE("jacobian and potentials") {
    const auto g = parse_profile("gaussian_dip:1,0,1", make_interval(-6, 6, true));
    const double eps = 0.1, s = 0.4, t = 0.6;
    const double k = g(s), kp = g.kappa_prime(s);
    const double h = 1 - k * eps * t;
    CHECK(jacobian_h(g, eps, s, t) == doctest::Approx(h));
    const CoefficientPoint c = potentials(g, eps, s, t);
    CHECK(c.h == doctest::Approx(h));
    CHECK(c.v1 == doctest::Approx(kp * kp * eps * eps * t * t / (4 * std::pow(h, 4))));
    CHECK(c.v2 == doctest::Approx(kp * eps * t / std::pow(h, 3)));
    CHECK(c.v3 == doctest::Approx(k * k / (4 * h * h)));
    CHECK(c.v4 == doctest::Approx(k / (eps * h)));
    CHECK(c.v_boundary == doctest::Approx(k / (2 * eps * (1 - eps * k))));
}

TEST_CASE("effective potentials") {
    const auto n = parse_profile("negcos", make_interval(-pi, pi));
    const double eps = 0.05;
    const auto dn = effective_potential(n, eps, BoundaryVariant::DN);
    const auto dd = effective_potential(n, eps, BoundaryVariant::Dirichlet);
    const auto rb = effective_potential(n, eps, BoundaryVariant::Robin, [](double) { return 0.25; });
    CHECK(dn(0.3) == doctest::Approx(-std::cos(0.3) / eps));
    CHECK(dd(0.3) == doctest::Approx(-std::cos(0.3) * std::cos(0.3) / 4));
    CHECK(rb(0.3) == doctest::Approx((-std::cos(0.3) + 0.5) / eps));
    CHECK_THROWS_AS(effective_potential(n, eps, BoundaryVariant::Robin), InvalidInput);
}

TEST_CASE("overlap integral against adaptive quadrature") {
    const auto z = parse_profile("zero", make_interval(0, 1));
    CHECK(overlap_a(z, 0.1, 0.5) == doctest::Approx(1.0));
    const auto c = parse_profile("constant:2", make_interval(0, 1));
    const double eps = 0.1;
    const double ref = integrate01([&](double t) { return 2 * std::pow(std::sin(pi * t / 2), 2) / (1 - 2 * eps * t); });
    CHECK(overlap_a(c, eps, 0.5) == doctest::Approx(ref).epsilon(1e-12));
}

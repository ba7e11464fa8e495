#include "dnstrip/coefficients.hpp"

#include "dnstrip/errors.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

namespace dnstrip {

namespace {

void check_t(double t) {
    if (!(t >= 0.0 && t <= 1.0)) throw InvalidInput("transverse coordinate t must lie in [0, 1]");
}

} // namespace

double transverse_threshold(BoundaryVariant variant, double eps) {
    const double q = (variant == BoundaryVariant::Dirichlet ? std::numbers::pi : 0.5 * std::numbers::pi) / eps;
    return q * q;
}

double jacobian_h(const CurvatureProfile& profile, double eps, double s, double t) {
    check_t(t);
    require_admissible(profile, eps);
    return 1.0 - profile.kappa(s) * eps * t;
}

double transverse_mode(double t) {
    check_t(t);
    return std::numbers::sqrt2 * std::sin(0.5 * std::numbers::pi * t);
}

CoefficientPoint potentials(const CurvatureProfile& profile, double eps, double s, double t) {
    check_t(t);
    if (!profile.has_kappa_prime()) throw InvalidInput("potentials need the curvature derivative");
    require_admissible(profile, eps);

    const double k = profile.kappa(s);
    const double kp = profile.kappa_prime(s);
    const double h = 1.0 - k * eps * t;
    const double h2 = h * h;

    CoefficientPoint c;
    c.h = h;
    c.v1 = 0.25 * kp * kp * eps * eps * t * t / (h2 * h2);
    c.v2 = kp * eps * t / (h2 * h);
    c.v3 = 0.25 * k * k / h2;
    c.v4 = k / (eps * h);
    c.v_boundary = 0.5 * k / (eps * (1.0 - eps * k));
    return c;
}

EffectivePotential effective_potential(const CurvatureProfile& profile, double eps, BoundaryVariant variant,
                                       const ScalarFunction& alpha) {
    if (!std::isfinite(eps) || eps <= 0.0) throw InvalidInput("eps must be positive");
    EffectivePotential v;
    v.variant = variant;
    const ScalarFunction kappa = profile.kappa;
    switch (variant) {
    case BoundaryVariant::DN:
        v.value = [kappa, eps](double s) { return kappa(s) / eps; };
        break;
    case BoundaryVariant::Dirichlet:
        v.value = [kappa](double s) {
            const double k = kappa(s);
            return -0.25 * k * k;
        };
        break;
    case BoundaryVariant::Robin:
        if (!alpha) throw InvalidInput("Robin effective potential needs alpha");
        v.value = [kappa, alpha, eps](double s) { return (kappa(s) + 2.0 * alpha(s)) / eps; };
        break;
    }
    return v;
}

double overlap_a(const CurvatureProfile& profile, double eps, double s) {
    require_admissible(profile, eps);
    const double k = profile.kappa(s);
    auto integrand = [&](double t) {
        const double chi = transverse_mode(t);
        return chi * chi / (1.0 - k * eps * t);
    };
    return boost::math::quadrature::gauss<double, 32>::integrate(integrand, 0.0, 1.0);
}

void write_coefficient_csv(std::ostream& out, const CurvatureProfile& profile, double eps, int ns, int nt) {
    if (ns < 1 || nt < 1) throw InvalidInput("coefficient dump needs ns, nt >= 1");
    out << "s,t,h,v1,v2,v3,v4,v_boundary\n";
    const Interval& I = profile.interval;
    char buf[256];
    for (int i = 0; i <= ns; ++i) {
        const double s = I.a + I.length() * i / ns;
        for (int j = 0; j <= nt; ++j) {
            const double t = static_cast<double>(j) / nt;
            const CoefficientPoint c = potentials(profile, eps, s, t);
            std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n", s, t, c.h, c.v1, c.v2,
                          c.v3, c.v4, c.v_boundary);
            out << buf;
        }
    }
}

} // namespace dnstrip

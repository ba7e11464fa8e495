#pragma once

#include "dnstrip/geometry.hpp"

#include <iosfwd>

namespace dnstrip {

/// Outer boundary (t = 1) condition selecting the effective 1D operator.
enum class BoundaryVariant { DN, Dirichlet, Robin };

/// Transverse threshold subtracted from strip eigenvalues: (pi/2eps)^2 for
/// Dirichlet-Neumann and Dirichlet-Robin strips, (pi/eps)^2 for Dirichlet-Dirichlet.
double transverse_threshold(BoundaryVariant variant, double eps);

/// h = 1 - kappa(s) eps t, the Jacobian factor of the strip map divided by eps.
double jacobian_h(const CurvatureProfile& profile, double eps, double s, double t);

/// sqrt(2) sin(pi t / 2): normalized lowest Dirichlet-Neumann mode on (0, 1).
double transverse_mode(double t);

/// Coefficients of the form obtained after the sqrt(h) gauge transform.
struct CoefficientPoint {
    double h = 1.0;
    double v1 = 0.0; ///< kappa'^2 eps^2 t^2 / (4 h^4)
    double v2 = 0.0; ///< kappa' eps t / h^3
    double v3 = 0.0; ///< kappa^2 / (4 h^2)
    double v4 = 0.0; ///< kappa / (eps h)
    double v_boundary = 0.0; ///< kappa / (2 eps (1 - eps kappa))
};

CoefficientPoint potentials(const CurvatureProfile& profile, double eps, double s, double t);

struct EffectivePotential {
    BoundaryVariant variant = BoundaryVariant::DN;
    ScalarFunction value;

    double operator()(double s) const { return value(s); }
};

/// DN: kappa/eps. Dirichlet: -kappa^2/4. Robin: (kappa + 2 alpha)/eps.
EffectivePotential effective_potential(const CurvatureProfile& profile, double eps, BoundaryVariant variant,
                                       const ScalarFunction& alpha = {});

/// a_eps(s) = int_0^1 chi_1(t)^2 / h(s, t) dt by 32-point Gauss-Legendre.
double overlap_a(const CurvatureProfile& profile, double eps, double s);

/// Debug dump on an (ns+1) x (nt+1) sample lattice: s,t,h,v1,v2,v3,v4,v_boundary.
void write_coefficient_csv(std::ostream& out, const CurvatureProfile& profile, double eps, int ns, int nt);

} // namespace dnstrip

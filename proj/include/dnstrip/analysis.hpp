#pragma once

#include "dnstrip/discretize.hpp"
#include "dnstrip/eigensolve.hpp"
#include "dnstrip/geometry.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dnstrip {

/// Strip geometry plus boundary conditions at one width.
struct StripProblem {
    CurvatureProfile profile;
    double eps = 0.1;
    BoundaryConditionSet bc = BoundaryConditionSet::dirichlet_neumann();
};

/// Coarsest grid of a nested family; level l has (Ns, Nt) * 2^l cells.
struct GridSpec {
    int Ns = 128;
    int Nt = 16;
    int levels = 3; ///< 2 or 3; Richardson needs at least two

    TensorGrid level(const Interval& interval, int l) const;
    std::string tag() const; ///< "128x16/3"
};

/// Richardson-extrapolated eigenvalues of a nested family.
///
/// With three levels the value is R(h, h/2) = (4 l_{h/2} - l_h) / 3 and the
/// error estimate |R(h, h/2) - R(2h, h)|; with two levels the value is
/// R(2h, h) and the estimate |l_h - l_{2h}| / 3.
struct Extrapolated {
    std::vector<double> value;
    std::vector<double> error;
    std::vector<std::vector<double>> raw; ///< raw[level][j]
};

Extrapolated richardson(const std::vector<std::vector<double>>& raw);

/// Lowest m eigenvalues of the weighted strip pencil on one grid.
Spectrum strip_spectrum(const StripProblem& problem, const TensorGrid& grid, int m, const EigenOptions& options = {});

/// Lowest transverse eigenvalue on Nt cells divided by eps^2: the discrete
/// counterpart of the threshold (pi/2eps)^2, or (pi/eps)^2 for Dirichlet.
double discrete_threshold(BoundaryVariant variant, double eps, int Nt);

/// strip_spectrum over the nested family of `grids`. The offsets
/// lambda - discrete_threshold are extrapolated, so the dominant transverse
/// error cancels, and the exact threshold is added back.
Extrapolated strip_spectrum_extrapolated(const StripProblem& problem, const GridSpec& grids, int m,
                                         const EigenOptions& options = {});

/// Lowest m eigenvalues of -d^2/ds^2 + V with Dirichlet ends, extrapolated
/// over three nested grids starting at Ns cells.
Extrapolated effective_spectrum(const ScalarFunction& potential, const Interval& interval, int m, int Ns = 2048,
                                const EigenOptions& options = {});

/// nu(c), the lowest eigenvalue of the transverse pencil, refined by doubling
/// Nt from 64 until successive Richardson values differ by at most tol.
double transverse_nu(double c, double tol = 1e-9);

/// Worker count for independent sweep points; results never depend on it.
struct SweepSettings {
    std::vector<double> eps_list; ///< strictly decreasing
    int j_max = 2;
    GridSpec grids;
    int ns_1d = 2048;
    int workers = 1;
    EigenOptions eigen;
    bool truncation_check = true;
    /// Relative change of lambda_j allowed when a truncated interval is doubled
    /// (compared at equal cell size, so discretization error cancels).
    double truncation_tol = 1e-6;
};

struct SweepRecord {
    double eps = 0.0;
    double threshold = 0.0; ///< transverse threshold subtracted from the strip eigenvalues
    std::vector<double> lambda_strip;
    std::vector<double> lambda_1d;
    std::vector<double> remainder_thm2; ///< lambda_strip - threshold - lambda_1d
    std::vector<double> scaled_thm1;    ///< eps (lambda_strip - threshold)
    std::vector<double> disc_err;       ///< strip estimate plus 1D estimate, per j
    std::vector<bool> trusted;          ///< disc_err_j < 0.1 |remainder_j|
    double discretization_error_estimate = 0.0; ///< max over j
    /// Max relative change of lambda_j when a truncated interval is doubled.
    /// The 1D reference lives on the same interval, so this does not enter disc_err.
    double truncation_shift = 0.0;
    bool truncation_ok = true;
    std::string grid;

    bool all_trusted() const;
};

/// Fit of y(eps) = L + c sqrt(eps) by least squares over the last three points.
struct LimitFit {
    double limit = 0.0;
    double slope = 0.0;
    double last_value = 0.0;
    int points = 0;
    /// max eps * disc_err over the fitted points (the error carried by y).
    double fitted_error = 0.0;
};

LimitFit fit_sqrt_limit(const std::vector<double>& eps, const std::vector<double>& y,
                        const std::vector<double>& y_error = {});

/// fit_sqrt_limit of scaled_thm1 per j, carrying eps * disc_err as the error.
std::vector<LimitFit> fit_limits(const std::vector<SweepRecord>& records, int j_max);

struct Thm1Result {
    std::vector<SweepRecord> records;
    std::vector<LimitFit> limits; ///< per j
    double inf_kappa = 0.0;       ///< expected limit (inf of the effective potential times eps)
};

/// Pipeline shared by the DN, Robin and Dirichlet-Dirichlet sweeps.
std::vector<SweepRecord> run_sweep(const CurvatureProfile& profile, const BoundaryConditionSet& bc,
                                   const SweepSettings& settings);

/// Scaled eigenvalues eps (lambda_j - (pi/2eps)^2) and their extrapolated limits.
Thm1Result sweep_thm1(const CurvatureProfile& profile, const SweepSettings& settings);

struct RemainderVerdict {
    int j = 1;
    double spread = 0.0; ///< max |r| / min |r| over trusted records
    double growth = 0.0; ///< max |r| / |r at the largest eps|
    bool trusted = false; ///< every record trusted for this j
};

struct Thm2Result {
    std::vector<SweepRecord> records;
    std::vector<RemainderVerdict> verdicts; ///< per j
};

std::vector<RemainderVerdict> remainder_verdicts(const std::vector<SweepRecord>& records, int j_max);

Thm2Result check_thm2(const CurvatureProfile& profile, const SweepSettings& settings);

struct ResolventGap {
    double eps = 0.0;
    double k = 0.0;
    double gap = 0.0;
    double ratio = 0.0; ///< gap / eps^{3/2}
};

struct GapSweep {
    std::vector<ResolventGap> points;
    double fitted_exponent = 0.0; ///< log-log least squares slope (NaN if any gap is 0)
    double ratio_spread = 0.0;    ///< max ratio / min ratio
};

/// 1 + 2 max(0, -inf kappa).
double default_shift_k(const CurvatureProfile& profile);

/// Norm of the difference of the inverses of the shifted flat and reference
/// pencils, on the finest grid of `grids`, for each eps.
GapSweep resolvent_gap_sweep(const CurvatureProfile& profile, double k, const std::vector<double>& eps_list,
                             const GridSpec& grids, int workers = 1, const GapOptions& options = {});

/// Least squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

struct DirichletResult {
    std::vector<SweepRecord> records;
    /// per j: |remainder| strictly decreasing along the sweep (trusted records only).
    std::vector<bool> decreasing;
};

/// Dirichlet on both curves; remainder lambda_j - (pi/eps)^2 - lambda_j(-d^2 - kappa^2/4).
DirichletResult dirichlet_compare(const CurvatureProfile& profile, const SweepSettings& settings);

/// Robin outer condition with coefficient alpha; effective potential (kappa + 2 alpha)/eps.
struct RobinResult {
    std::vector<SweepRecord> records;
    std::vector<LimitFit> limits;
    double expected_limit = 0.0; ///< inf (kappa + 2 alpha)
};

RobinResult robin_sweep(const CurvatureProfile& profile, const ScalarFunction& alpha,
                        const SweepSettings& settings);

struct BoundStateCount {
    int count = 0;
    int doubled_count = 0; ///< same count on the doubled interval (equals count when not truncated)
    double threshold = 0.0;
    double margin = 0.0;
    double lambda1 = 0.0;
    double lambda1_error = 0.0;
};

/// Eigenvalues below (pi/2eps)^2 - margin on the finest grid, counted by
/// inertia. A non-positive margin selects 10x the error estimate of lambda_1.
/// Throws NumericalFailure if the count changes when a truncated interval is doubled.
BoundStateCount count_bound_states(const StripProblem& problem, const GridSpec& grids, double margin = 0.0,
                                   const EigenOptions& options = {});

/// Which circle of the annular sector carries the Dirichlet condition.
/// Dirichlet is always at r = R; the Neumann circle is r = R - eps (Outer)
/// or r = R + eps (Inner).
enum class AnnulusSide { DirichletOuter, DirichletInner };

/// Lowest radial eigenvalue k^2 for each angular order nu = m pi / theta,
/// m = 1 .. m_max, sorted ascending.
std::vector<double> annulus_oracle(double R, double eps, double theta, AnnulusSide side, int m_max);

/// First positive zero of J_0, located by bisection on the library Bessel J_0.
double bessel_j0_first_zero();

} // namespace dnstrip

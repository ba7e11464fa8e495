#include "dnstrip/analysis.hpp"

#include "dnstrip/coefficients.hpp"
#include "dnstrip/errors.hpp"

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/bessel_prime.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

namespace dnstrip {

namespace {

// Runs body(i) for i in [0, n) on up to `workers` threads. The first failure
// in index order is rethrown, so errors do not depend on scheduling.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& body) {
    std::vector<std::exception_ptr> failures(n);
    auto run = [&](std::size_t i) {
        try {
            body(i);
        } catch (...) {
            failures[i] = std::current_exception();
        }
    };
    const std::size_t threads = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, workers)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) run(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) run(i);
            });
        for (auto& th : pool) th.join();
    }
    for (auto& f : failures)
        if (f) std::rethrow_exception(f);
}

void check_eps_list(const std::vector<double>& eps_list) {
    if (eps_list.empty()) throw InvalidInput("eps_list must not be empty");
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
        if (!(eps_list[i] > 0.0) || !std::isfinite(eps_list[i])) throw InvalidInput("eps values must be positive");
        if (i > 0 && !(eps_list[i] < eps_list[i - 1])) throw InvalidInput("eps_list must be decreasing");
    }
}

void check_grids(const GridSpec& g) {
    if (g.levels < 2 || g.levels > 3) throw InvalidInput("grid family needs 2 or 3 levels");
    if (g.Ns < 2 || g.Nt < 2) throw InvalidInput("grid needs Ns >= 2 and Nt >= 2");
}

Interval doubled(const Interval& I) {
    const double half = 0.5 * I.length();
    return make_interval(I.a - half, I.b + half, I.truncated);
}

double sampled_inf(const ScalarFunction& f, const Interval& I) {
    double m = std::numeric_limits<double>::infinity();
    const int n = 4096;
    for (int i = 0; i <= n; ++i) m = std::min(m, f(I.a + I.length() * i / n));
    return m;
}

} // namespace

TensorGrid GridSpec::level(const Interval& interval, int l) const {
    return build_grid(interval, Ns << l, Nt << l);
}

std::string GridSpec::tag() const {
    std::ostringstream s;
    s << Ns << 'x' << Nt << '/' << levels;
    return s.str();
}

Extrapolated richardson(const std::vector<std::vector<double>>& raw) {
    if (raw.size() < 2) throw InvalidInput("Richardson extrapolation needs two levels");
    Extrapolated e;
    e.raw = raw;
    const std::size_t m = raw.front().size();
    const std::size_t L = raw.size();
    auto R = [&](std::size_t l, std::size_t j) { return (4.0 * raw[l][j] - raw[l - 1][j]) / 3.0; };
    for (std::size_t j = 0; j < m; ++j) {
        if (L >= 3) {
            e.value.push_back(R(L - 1, j));
            e.error.push_back(std::abs(R(L - 1, j) - R(L - 2, j)));
        } else {
            e.value.push_back(R(1, j));
            e.error.push_back(std::abs(raw[1][j] - raw[0][j]) / 3.0);
        }
    }
    return e;
}

Spectrum strip_spectrum(const StripProblem& problem, const TensorGrid& grid, int m, const EigenOptions& options) {
    require_admissible(problem.profile, problem.eps);
    const GeneralizedPencil p = assemble_weighted(problem.profile, problem.eps, problem.bc, grid);
    return smallest_eigenpairs(p, m, options);
}

double discrete_threshold(BoundaryVariant variant, double eps, int Nt) {
    EigenOptions opts;
    opts.tol = 1e-10;
    const GeneralizedPencil p = variant == BoundaryVariant::Dirichlet
                                    ? assemble_1d([](double) { return 0.0; }, make_interval(0.0, 1.0), Nt)
                                    : assemble_transverse(0.0, Nt);
    return smallest_eigenpairs(p, 1, opts).eigenvalues[0] / (eps * eps);
}

Extrapolated strip_spectrum_extrapolated(const StripProblem& problem, const GridSpec& grids, int m,
                                         const EigenOptions& options) {
    check_grids(grids);
    const BoundaryVariant variant = problem.bc.variant();
    std::vector<std::vector<double>> raw, offset;
    for (int l = 0; l < grids.levels; ++l) {
        const TensorGrid grid = grids.level(problem.profile.interval, l);
        raw.push_back(strip_spectrum(problem, grid, m, options).eigenvalues);
        const double thr = discrete_threshold(variant, problem.eps, grid.Nt);
        offset.push_back(raw.back());
        for (double& v : offset.back()) v -= thr;
    }
    Extrapolated e = richardson(offset);
    const double exact = transverse_threshold(variant, problem.eps);
    for (double& v : e.value) v += exact;
    e.raw = std::move(raw);
    return e;
}

Extrapolated effective_spectrum(const ScalarFunction& potential, const Interval& interval, int m, int Ns,
                                const EigenOptions& options) {
    std::vector<std::vector<double>> raw;
    for (int l = 0; l < 3; ++l)
        raw.push_back(smallest_eigenpairs(assemble_1d(potential, interval, Ns << l), m, options).eigenvalues);
    return richardson(raw);
}

double transverse_nu(double c, double tol) {
    if (!(c < 1.0)) throw InvalidInput("transverse weight needs c < 1");
    if (!(tol > 0.0)) throw InvalidInput("tolerance must be positive");
    EigenOptions opts;
    opts.tol = 1e-10;
    double prev_lambda = std::numeric_limits<double>::quiet_NaN();
    double prev_R = std::numeric_limits<double>::quiet_NaN();
    for (int Nt = 64; Nt <= (1 << 18); Nt *= 2) {
        const double lambda = smallest_eigenpairs(assemble_transverse(c, Nt), 1, opts).eigenvalues[0];
        if (!std::isnan(prev_lambda)) {
            const double R = (4.0 * lambda - prev_lambda) / 3.0;
            if (!std::isnan(prev_R) && std::abs(R - prev_R) <= tol) return R;
            prev_R = R;
        }
        prev_lambda = lambda;
    }
    throw NumericalFailure("transverse eigenvalue did not reach the requested tolerance");
}

bool SweepRecord::all_trusted() const {
    return std::all_of(trusted.begin(), trusted.end(), [](bool t) { return t; });
}

LimitFit fit_sqrt_limit(const std::vector<double>& eps, const std::vector<double>& y,
                        const std::vector<double>& y_error) {
    if (eps.size() != y.size() || eps.empty()) throw InvalidInput("fit needs matching, non-empty samples");
    LimitFit f;
    f.last_value = y.back();
    const std::size_t n = eps.size(), first = n >= 3 ? n - 3 : 0;
    f.points = static_cast<int>(n - first);
    for (std::size_t i = first; i < n && !y_error.empty(); ++i) f.fitted_error = std::max(f.fitted_error, y_error[i]);
    if (f.points == 1) {
        f.limit = y.back();
        return f;
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = first; i < n; ++i) {
        const double x = std::sqrt(eps[i]);
        sx += x;
        sy += y[i];
        sxx += x * x;
        sxy += x * y[i];
    }
    const double k = f.points;
    f.slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    f.limit = (sy - f.slope * sx) / k;
    return f;
}

std::vector<SweepRecord> run_sweep(const CurvatureProfile& profile, const BoundaryConditionSet& bc,
                                   const SweepSettings& settings) {
    check_eps_list(settings.eps_list);
    check_grids(settings.grids);
    if (settings.j_max < 1) throw InvalidInput("j_max must be at least 1");
    for (double eps : settings.eps_list) require_admissible(profile, eps);
    const BoundaryVariant variant = bc.variant();
    const int m = settings.j_max;

    std::vector<SweepRecord> records(settings.eps_list.size());
    parallel_for(records.size(), settings.workers, [&](std::size_t idx) {
        const double eps = settings.eps_list[idx];
        const StripProblem problem{profile, eps, bc};
        const Extrapolated strip = strip_spectrum_extrapolated(problem, settings.grids, m, settings.eigen);
        const EffectivePotential V = effective_potential(profile, eps, variant, bc.alpha);
        const Extrapolated one = effective_spectrum(V.value, profile.interval, m, settings.ns_1d, settings.eigen);

        SweepRecord r;
        r.eps = eps;
        r.threshold = transverse_threshold(variant, eps);
        r.grid = settings.grids.tag();

        if (settings.truncation_check && profile.interval.truncated) {
            // Same cell size on twice the interval, so only the truncation differs.
            const TensorGrid base = settings.grids.level(profile.interval, 0);
            const CurvatureProfile wide = with_interval(profile, doubled(profile.interval));
            const TensorGrid wide_grid = build_grid(wide.interval, 2 * base.Ns, base.Nt);
            const auto narrow_l = strip_spectrum(problem, base, m, settings.eigen).eigenvalues;
            const auto wide_l = strip_spectrum({wide, eps, bc}, wide_grid, m, settings.eigen).eigenvalues;
            for (int j = 0; j < m; ++j)
                r.truncation_shift = std::max(r.truncation_shift, std::abs(narrow_l[j] - wide_l[j]) / std::abs(narrow_l[j]));
        }
        r.truncation_ok = r.truncation_shift <= settings.truncation_tol;

        for (int j = 0; j < m; ++j) {
            const double ls = strip.value[j], l1 = one.value[j];
            r.lambda_strip.push_back(ls);
            r.lambda_1d.push_back(l1);
            r.remainder_thm2.push_back(ls - r.threshold - l1);
            r.scaled_thm1.push_back(eps * (ls - r.threshold));
            r.disc_err.push_back(strip.error[j] + one.error[j]);
            r.trusted.push_back(r.disc_err.back() < 0.1 * std::abs(r.remainder_thm2.back()));
            r.discretization_error_estimate = std::max(r.discretization_error_estimate, r.disc_err.back());
        }
        records[idx] = std::move(r);
    });
    return records;
}

std::vector<LimitFit> fit_limits(const std::vector<SweepRecord>& records, int j_max) {
    std::vector<LimitFit> out;
    std::vector<double> eps;
    for (const auto& r : records) eps.push_back(r.eps);
    for (int j = 0; j < j_max; ++j) {
        std::vector<double> y, e;
        for (const auto& r : records) {
            y.push_back(r.scaled_thm1[j]);
            e.push_back(r.eps * r.disc_err[j]);
        }
        out.push_back(fit_sqrt_limit(eps, y, e));
    }
    return out;
}

Thm1Result sweep_thm1(const CurvatureProfile& profile, const SweepSettings& settings) {
    Thm1Result out;
    out.records = run_sweep(profile, BoundaryConditionSet::dirichlet_neumann(), settings);
    out.limits = fit_limits(out.records, settings.j_max);
    out.inf_kappa = profile.inf_kappa;
    return out;
}

std::vector<RemainderVerdict> remainder_verdicts(const std::vector<SweepRecord>& records, int j_max) {
    std::vector<RemainderVerdict> out;
    for (int j = 0; j < j_max; ++j) {
        RemainderVerdict v;
        v.j = j + 1;
        v.trusted = true;
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (const auto& r : records) {
            if (!r.trusted[j]) {
                v.trusted = false;
                continue;
            }
            const double a = std::abs(r.remainder_thm2[j]);
            lo = std::min(lo, a);
            hi = std::max(hi, a);
        }
        v.spread = hi / lo;
        v.growth = hi / std::abs(records.front().remainder_thm2[j]);
        out.push_back(v);
    }
    return out;
}

Thm2Result check_thm2(const CurvatureProfile& profile, const SweepSettings& settings) {
    Thm2Result out;
    out.records = run_sweep(profile, BoundaryConditionSet::dirichlet_neumann(), settings);
    out.verdicts = remainder_verdicts(out.records, settings.j_max);
    return out;
}

double default_shift_k(const CurvatureProfile& profile) {
    return 1.0 + 2.0 * std::max(0.0, -profile.inf_kappa);
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw InvalidInput("slope needs at least two matching samples");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) return std::numeric_limits<double>::quiet_NaN();
        const double u = std::log(x[i]), v = std::log(y[i]);
        sx += u;
        sy += v;
        sxx += u * u;
        sxy += u * v;
    }
    const double n = static_cast<double>(x.size());
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

GapSweep resolvent_gap_sweep(const CurvatureProfile& profile, double k, const std::vector<double>& eps_list,
                             const GridSpec& grids, int workers, const GapOptions& options) {
    check_eps_list(eps_list);
    if (grids.Ns < 2 || grids.Nt < 2 || grids.levels < 1) throw InvalidInput("invalid grid family");
    if (!std::isfinite(k) || !(k > -profile.inf_kappa)) throw InvalidInput("shift k must satisfy k > -inf kappa");
    if (!profile.has_kappa_prime()) throw InvalidInput("resolvent sweep needs the curvature derivative");
    for (double eps : eps_list) require_admissible(profile, eps);

    GapSweep out;
    out.points.resize(eps_list.size());
    parallel_for(eps_list.size(), workers, [&](std::size_t i) {
        const double eps = eps_list[i];
        const TensorGrid grid = grids.level(profile.interval, grids.levels - 1);
        const GeneralizedPencil flat =
            assemble_flat(profile, eps, BoundaryConditionSet::dirichlet_neumann(), grid, k);
        const GeneralizedPencil ref = assemble_reference(profile, eps, grid, k);
        ResolventGap g;
        g.eps = eps;
        g.k = k;
        g.gap = operator_gap_norm(flat, ref, options);
        g.ratio = g.gap / std::pow(eps, 1.5);
        out.points[i] = g;
    });

    std::vector<double> e, gaps;
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& p : out.points) {
        e.push_back(p.eps);
        gaps.push_back(p.gap);
        lo = std::min(lo, p.ratio);
        hi = std::max(hi, p.ratio);
    }
    out.fitted_exponent = eps_list.size() >= 2 ? loglog_slope(e, gaps) : std::numeric_limits<double>::quiet_NaN();
    out.ratio_spread = lo > 0.0 ? hi / lo : std::numeric_limits<double>::quiet_NaN();
    return out;
}

DirichletResult dirichlet_compare(const CurvatureProfile& profile, const SweepSettings& settings) {
    DirichletResult out;
    out.records = run_sweep(profile, BoundaryConditionSet::dirichlet_dirichlet(), settings);
    for (int j = 0; j < settings.j_max; ++j) {
        std::vector<double> mags;
        for (const auto& r : out.records)
            if (r.trusted[j]) mags.push_back(std::abs(r.remainder_thm2[j]));
        bool dec = mags.size() >= 2;
        for (std::size_t i = 1; i < mags.size() && dec; ++i) dec = mags[i] < mags[i - 1];
        out.decreasing.push_back(dec);
    }
    return out;
}

RobinResult robin_sweep(const CurvatureProfile& profile, const ScalarFunction& alpha, const SweepSettings& settings) {
    if (!alpha) throw InvalidInput("Robin sweep needs alpha");
    RobinResult out;
    out.records = run_sweep(profile, BoundaryConditionSet::dirichlet_robin(alpha), settings);
    out.limits = fit_limits(out.records, settings.j_max);
    const ScalarFunction kappa = profile.kappa;
    out.expected_limit = sampled_inf([&](double s) { return kappa(s) + 2.0 * alpha(s); }, profile.interval);
    return out;
}

BoundStateCount count_bound_states(const StripProblem& problem, const GridSpec& grids, double margin,
                                   const EigenOptions& options) {
    if (problem.bc.outer != OuterCondition::Neumann) throw InvalidInput("bound-state count is defined for DN strips");
    check_grids(grids);
    BoundStateCount c;
    c.threshold = transverse_threshold(BoundaryVariant::DN, problem.eps);
    const Extrapolated l1 = strip_spectrum_extrapolated(problem, grids, 1, options);
    c.lambda1 = l1.value[0];
    c.lambda1_error = l1.error[0];
    c.margin = margin > 0.0 ? margin : 10.0 * c.lambda1_error;

    const int top = grids.levels - 1;
    const TensorGrid fine = grids.level(problem.profile.interval, top);
    const double tau = c.threshold - c.margin;
    c.count = static_cast<int>(
        count_below(assemble_weighted(problem.profile, problem.eps, problem.bc, fine), tau));
    c.doubled_count = c.count;
    if (problem.profile.interval.truncated) {
        const CurvatureProfile wide = with_interval(problem.profile, doubled(problem.profile.interval));
        const TensorGrid wide_grid = build_grid(wide.interval, 2 * fine.Ns, fine.Nt);
        c.doubled_count =
            static_cast<int>(count_below(assemble_weighted(wide, problem.eps, problem.bc, wide_grid), tau));
        if (c.doubled_count != c.count) {
            std::ostringstream msg;
            msg << "bound-state count unstable under domain doubling: " << c.count << " vs " << c.doubled_count;
            throw NumericalFailure(msg.str());
        }
    }
    return c;
}

std::vector<double> annulus_oracle(double R, double eps, double theta, AnnulusSide side, int m_max) {
    if (!(R > 0.0) || !(eps > 0.0) || !(eps < R)) throw InvalidInput("annulus needs 0 < eps < R");
    if (!(theta > 0.0) || theta > 2.0 * std::numbers::pi) throw InvalidInput("sector angle must lie in (0, 2 pi]");
    if (m_max < 1) throw InvalidInput("m_max must be at least 1");
    namespace bm = boost::math;
    const double rho = side == AnnulusSide::DirichletOuter ? R - eps : R + eps;

    std::vector<double> out;
    for (int m = 1; m <= m_max; ++m) {
        const double nu = m * std::numbers::pi / theta;
        auto f = [&](double k) {
            return bm::cyl_bessel_j(nu, k * R) * bm::cyl_neumann_prime(nu, k * rho) -
                   bm::cyl_neumann(nu, k * R) * bm::cyl_bessel_j_prime(nu, k * rho);
        };
        // Weight comparison bounds the radial ground state below by (r_min/r_max)(pi/2eps)^2.
        const double rmin = std::min(R, rho), rmax = std::max(R, rho);
        const double k_lo = 0.9 * std::sqrt(rmin / rmax) * 0.5 * std::numbers::pi / eps;
        const double k_hi = k_lo + 2.0 * nu / rmin + 4.0 * std::numbers::pi / eps;
        const double step = 0.01 * std::numbers::pi / eps;
        double a = k_lo, fa = f(a);
        bool found = false;
        for (double b = a + step; b <= k_hi; b += step) {
            const double fb = f(b);
            if (fa == 0.0 || (fa < 0.0) != (fb < 0.0)) {
                double lo = a, hi = b, flo = fa;
                for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
                    const double mid = 0.5 * (lo + hi), fm = f(mid);
                    if ((fm < 0.0) == (flo < 0.0)) {
                        lo = mid;
                        flo = fm;
                    } else {
                        hi = mid;
                    }
                }
                const double k = 0.5 * (lo + hi);
                out.push_back(k * k);
                found = true;
                break;
            }
            a = b;
            fa = fb;
        }
        if (!found) {
            std::ostringstream msg;
            msg << "no Bessel cross-product root bracketed in [" << k_lo << ", " << k_hi << "] for nu = " << nu;
            throw NumericalFailure(msg.str());
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

double bessel_j0_first_zero() {
    double lo = 2.0, hi = 3.0;
    auto j0 = [](double x) { return boost::math::cyl_bessel_j(0, x); };
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        if ((j0(mid) > 0.0) == (j0(lo) > 0.0))
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace dnstrip

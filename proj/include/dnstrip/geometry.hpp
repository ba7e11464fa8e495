#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dnstrip {

/// Parameter interval I of the reference curve. `truncated` marks a finite
/// stand-in for an unbounded interval; Dirichlet conditions close the ends.
struct Interval {
    double a = 0.0;
    double b = 1.0;
    bool truncated = false;

    double length() const { return b - a; }
    bool contains(double s) const { return s >= a && s <= b; }
};

/// Throws InvalidInput unless a < b and both ends are finite.
Interval make_interval(double a, double b, bool truncated = false);

using ScalarFunction = std::function<double(double)>;

/// Signed curvature of a unit-speed planar curve on an interval.
///
/// Spectra of the strip depend on the curve only through kappa; the curve
/// itself is reconstructed on demand by `embed`.
struct CurvatureProfile {
    std::string name;
    std::vector<double> params;
    Interval interval;
    ScalarFunction kappa;
    ScalarFunction kappa_prime;      // empty when unavailable
    bool kappa_prime_from_fd = false; // centered finite difference substitute
    bool is_preset = false;
    double inf_kappa = 0.0;
    double sup_kappa = 0.0;
    double sup_abs_kappa = 0.0;
    double sup_abs_kappa_prime = 0.0;

    double operator()(double s) const { return kappa(s); }
    bool has_kappa_prime() const { return static_cast<bool>(kappa_prime); }
};

/// Presets: zero, constant(c), gaussian_dip(a, s0, w), negcos.
/// gaussian_dip is kappa(s) = -a exp(-(s-s0)^2/w^2); negcos is kappa(s) = -cos(s).
CurvatureProfile make_profile(std::string_view preset, std::span<const double> params,
                              Interval interval);

/// Wraps an arbitrary bounded curvature. Bounds are sampled; a missing
/// derivative is replaced by a centered difference with step 1e-6 (b - a).
CurvatureProfile make_custom_profile(std::string name, Interval interval, ScalarFunction kappa,
                                     ScalarFunction kappa_prime = {});

/// Same curvature law on a different interval (used by domain-doubling checks).
CurvatureProfile with_interval(const CurvatureProfile& profile, Interval interval);

/// Parses "gaussian_dip:1,0,1", "constant:1", "zero", "negcos".
CurvatureProfile parse_profile(std::string_view spec, Interval interval);

/// Structured text record {name, interval, params} (JSON).
std::string to_record(const CurvatureProfile& profile);
CurvatureProfile profile_from_record(std::string_view record);

inline constexpr double kAdmissibilitySafety = 0.5;

struct ValidityReport {
    double eps = 0.0;
    double eps_sup_kappa = 0.0;
    bool admissible = false;
    double h_lower = 1.0; ///< 1 - eps sup kappa
    double h_upper = 1.0; ///< 1 - eps inf kappa
    std::vector<std::string> messages;
};

ValidityReport validate(const CurvatureProfile& profile, double eps);

/// Throws InvalidInput with the report's messages when (profile, eps) is not admissible.
void require_admissible(const CurvatureProfile& profile, double eps);

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

struct StripEmbedding {
    std::vector<double> s;
    std::vector<Point2> base;     // gamma(s)
    std::vector<Point2> parallel; // gamma(s) + eps n(s)
    std::array<Point2, 2> start_segment{};
    std::array<Point2, 2> end_segment{};
};

/// Reconstructs gamma from kappa via the Frenet system (RK4), starting at the
/// origin with horizontal tangent, and offsets it by eps along the normal
/// n = (-gamma_2', gamma_1').
StripEmbedding embed(const CurvatureProfile& profile, double eps, int n_points);

/// Sampled check: do any two non-adjacent segments of the boundary polylines cross?
bool has_self_intersection(const StripEmbedding& strip);

/// CSV with columns s,x_base,y_base,x_parallel,y_parallel.
void write_embedding_csv(std::ostream& out, const StripEmbedding& strip);

} // namespace dnstrip

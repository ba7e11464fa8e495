#include "dnstrip/geometry.hpp"

#include "dnstrip/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <limits>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

namespace dnstrip {

namespace {

bool all_finite(std::span<const double> values) {
    return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

struct Extrema {
    double min = 0.0;
    double max = 0.0;
    double max_abs = 0.0;
};

// Extrema of f over [a, b] attained at one of the candidate points (ends plus
// interior critical points).
Extrema extrema_over(const ScalarFunction& f, std::vector<double> candidates, const Interval& I) {
    candidates.push_back(I.a);
    candidates.push_back(I.b);
    Extrema e{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(), 0.0};
    for (double s : candidates) {
        if (!I.contains(s)) continue;
        const double v = f(s);
        e.min = std::min(e.min, v);
        e.max = std::max(e.max, v);
        e.max_abs = std::max(e.max_abs, std::abs(v));
    }
    return e;
}

Extrema sampled_extrema(const ScalarFunction& f, const Interval& I, int samples = 4096) {
    Extrema e{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(), 0.0};
    for (int i = 0; i <= samples; ++i) {
        const double s = I.a + I.length() * static_cast<double>(i) / samples;
        const double v = f(s);
        if (!std::isfinite(v)) throw InvalidInput("curvature is not finite at s = " + std::to_string(s));
        e.min = std::min(e.min, v);
        e.max = std::max(e.max, v);
        e.max_abs = std::max(e.max_abs, std::abs(v));
    }
    return e;
}

// Points a + k*period + offset inside I.
std::vector<double> periodic_points(const Interval& I, double offset, double period) {
    std::vector<double> pts;
    const double k0 = std::ceil((I.a - offset) / period);
    for (double k = k0; offset + k * period <= I.b; k += 1.0) pts.push_back(offset + k * period);
    return pts;
}

void finish_bounds(CurvatureProfile& p, const Extrema& k, const Extrema& kp) {
    p.inf_kappa = k.min;
    p.sup_kappa = k.max;
    p.sup_abs_kappa = k.max_abs;
    p.sup_abs_kappa_prime = kp.max_abs;
}

std::vector<double> parse_number_list(std::string_view text) {
    std::vector<double> values;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = text.find(',', pos);
        const std::string item(text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            throw InvalidInput("cannot parse number '" + item + "'");
        }
        if (used != item.size()) throw InvalidInput("cannot parse number '" + item + "'");
        values.push_back(v);
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return values;
}

} // namespace

Interval make_interval(double a, double b, bool truncated) {
    if (!std::isfinite(a) || !std::isfinite(b)) throw InvalidInput("interval endpoints must be finite");
    if (!(a < b)) throw InvalidInput("interval requires a < b");
    return Interval{a, b, truncated};
}

CurvatureProfile make_profile(std::string_view preset, std::span<const double> params, Interval I) {
    I = make_interval(I.a, I.b, I.truncated);
    if (!all_finite(params)) throw InvalidInput("profile parameters must be finite");

    auto expect = [&](std::size_t count) {
        if (params.size() != count)
            throw InvalidInput(std::string(preset) + " expects " + std::to_string(count) + " parameter(s), got " +
                               std::to_string(params.size()));
    };

    CurvatureProfile p;
    p.name = std::string(preset);
    p.params.assign(params.begin(), params.end());
    p.interval = I;
    p.is_preset = true;

    if (preset == "zero") {
        expect(0);
        p.kappa = [](double) { return 0.0; };
        p.kappa_prime = [](double) { return 0.0; };
        finish_bounds(p, {0.0, 0.0, 0.0}, {0.0, 0.0, 0.0});
    } else if (preset == "constant") {
        expect(1);
        const double c = params[0];
        p.kappa = [c](double) { return c; };
        p.kappa_prime = [](double) { return 0.0; };
        finish_bounds(p, {c, c, std::abs(c)}, {0.0, 0.0, 0.0});
    } else if (preset == "gaussian_dip") {
        expect(3);
        const double depth = params[0], s0 = params[1], w = params[2];
        if (w <= 0.0) throw InvalidInput("gaussian_dip width must be positive");
        p.kappa = [=](double s) {
            const double x = (s - s0) / w;
            return -depth * std::exp(-x * x);
        };
        p.kappa_prime = [=](double s) {
            const double x = (s - s0) / w;
            return 2.0 * depth * x / w * std::exp(-x * x);
        };
        const double r = w / std::numbers::sqrt2;
        finish_bounds(p, extrema_over(p.kappa, {s0}, I), extrema_over(p.kappa_prime, {s0 - r, s0 + r}, I));
    } else if (preset == "negcos") {
        expect(0);
        p.kappa = [](double s) { return -std::cos(s); };
        p.kappa_prime = [](double s) { return std::sin(s); };
        finish_bounds(p, extrema_over(p.kappa, periodic_points(I, 0.0, std::numbers::pi), I),
                      extrema_over(p.kappa_prime, periodic_points(I, 0.5 * std::numbers::pi, std::numbers::pi), I));
    } else {
        throw InvalidInput("unknown profile preset '" + std::string(preset) + "'");
    }
    return p;
}

CurvatureProfile make_custom_profile(std::string name, Interval I, ScalarFunction kappa, ScalarFunction kappa_prime) {
    I = make_interval(I.a, I.b, I.truncated);
    if (!kappa) throw InvalidInput("custom profile needs a curvature function");
    CurvatureProfile p;
    p.name = std::move(name);
    p.interval = I;
    p.kappa = std::move(kappa);
    if (kappa_prime) {
        p.kappa_prime = std::move(kappa_prime);
    } else {
        const double step = 1e-6 * I.length();
        p.kappa_prime = [k = p.kappa, step](double s) { return (k(s + step) - k(s - step)) / (2.0 * step); };
        p.kappa_prime_from_fd = true;
    }
    finish_bounds(p, sampled_extrema(p.kappa, I), sampled_extrema(p.kappa_prime, I));
    return p;
}

CurvatureProfile with_interval(const CurvatureProfile& profile, Interval I) {
    if (profile.is_preset) return make_profile(profile.name, profile.params, I);
    return make_custom_profile(profile.name, I, profile.kappa, profile.kappa_prime_from_fd ? ScalarFunction{} : profile.kappa_prime);
}

CurvatureProfile parse_profile(std::string_view spec, Interval I) {
    const std::size_t colon = spec.find(':');
    const std::string_view name = spec.substr(0, colon);
    std::vector<double> params;
    if (colon != std::string_view::npos && colon + 1 < spec.size()) params = parse_number_list(spec.substr(colon + 1));
    return make_profile(name, params, I);
}

std::string to_record(const CurvatureProfile& profile) {
    if (!profile.is_preset) throw InvalidInput("only preset profiles are serializable");
    nlohmann::json j;
    j["name"] = profile.name;
    j["interval"] = {{"a", profile.interval.a}, {"b", profile.interval.b}, {"truncated", profile.interval.truncated}};
    j["params"] = profile.params;
    return j.dump();
}

CurvatureProfile profile_from_record(std::string_view record) {
    try {
        const auto j = nlohmann::json::parse(record);
        const auto& iv = j.at("interval");
        const Interval I{iv.at("a").get<double>(), iv.at("b").get<double>(), iv.value("truncated", false)};
        const auto params = j.at("params").get<std::vector<double>>();
        return make_profile(j.at("name").get<std::string>(), params, I);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("malformed profile record: ") + e.what());
    }
}

ValidityReport validate(const CurvatureProfile& profile, double eps) {
    if (!std::isfinite(eps) || eps <= 0.0) throw InvalidInput("eps must be positive");
    ValidityReport r;
    r.eps = eps;
    r.eps_sup_kappa = eps * profile.sup_abs_kappa;
    r.admissible = r.eps_sup_kappa <= kAdmissibilitySafety;
    r.h_lower = 1.0 - eps * profile.sup_kappa;
    r.h_upper = 1.0 - eps * profile.inf_kappa;
    if (!r.admissible) {
        std::ostringstream msg;
        msg << "eps*sup|kappa| = " << r.eps_sup_kappa << " exceeds the admissibility bound " << kAdmissibilitySafety;
        r.messages.push_back(msg.str());
    }
    if (profile.interval.truncated) r.messages.push_back("interval is a truncation of an unbounded domain");
    return r;
}

void require_admissible(const CurvatureProfile& profile, double eps) {
    const ValidityReport r = validate(profile, eps);
    if (!r.admissible) throw InvalidInput("inadmissible (profile, eps): " + r.messages.front());
}

StripEmbedding embed(const CurvatureProfile& profile, double eps, int n_points) {
    if (n_points < 2) throw InvalidInput("embed needs at least 2 points");
    require_admissible(profile, eps);

    const Interval& I = profile.interval;
    const int substeps = static_cast<int>(std::ceil(std::max(1024.0, double(n_points)) / (n_points - 1)));
    const double step = I.length() / (static_cast<double>(n_points - 1) * substeps);

    struct State {
        double x, y, theta;
    };
    auto rhs = [&](double s, const State& q) { return State{std::cos(q.theta), std::sin(q.theta), profile.kappa(s)}; };
    auto axpy = [](const State& q, double h, const State& d) {
        return State{q.x + h * d.x, q.y + h * d.y, q.theta + h * d.theta};
    };

    StripEmbedding out;
    out.s.reserve(n_points);
    out.base.reserve(n_points);
    out.parallel.reserve(n_points);

    State q{0.0, 0.0, 0.0};
    double s = I.a;
    auto record = [&](double at, const State& st) {
        out.s.push_back(at);
        out.base.push_back({st.x, st.y});
        out.parallel.push_back({st.x - eps * std::sin(st.theta), st.y + eps * std::cos(st.theta)});
    };
    record(s, q);
    for (int i = 1; i < n_points; ++i) {
        for (int k = 0; k < substeps; ++k) {
            const State k1 = rhs(s, q);
            const State k2 = rhs(s + 0.5 * step, axpy(q, 0.5 * step, k1));
            const State k3 = rhs(s + 0.5 * step, axpy(q, 0.5 * step, k2));
            const State k4 = rhs(s + step, axpy(q, step, k3));
            q = State{q.x + step / 6.0 * (k1.x + 2 * k2.x + 2 * k3.x + k4.x),
                      q.y + step / 6.0 * (k1.y + 2 * k2.y + 2 * k3.y + k4.y),
                      q.theta + step / 6.0 * (k1.theta + 2 * k2.theta + 2 * k3.theta + k4.theta)};
            s += step;
        }
        s = I.a + I.length() * static_cast<double>(i) / (n_points - 1);
        record(s, q);
    }
    out.start_segment = {out.base.front(), out.parallel.front()};
    out.end_segment = {out.base.back(), out.parallel.back()};
    return out;
}

namespace {

double orient(const Point2& a, const Point2& b, const Point2& c) {
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

bool segments_cross(const Point2& p1, const Point2& p2, const Point2& q1, const Point2& q2) {
    if (std::max(p1.x, p2.x) < std::min(q1.x, q2.x) || std::max(q1.x, q2.x) < std::min(p1.x, p2.x) ||
        std::max(p1.y, p2.y) < std::min(q1.y, q2.y) || std::max(q1.y, q2.y) < std::min(p1.y, p2.y))
        return false;
    const double d1 = orient(q1, q2, p1), d2 = orient(q1, q2, p2);
    const double d3 = orient(p1, p2, q1), d4 = orient(p1, p2, q2);
    return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0;
}

} // namespace

bool has_self_intersection(const StripEmbedding& strip) {
    // Closed boundary loop: base forward, end segment, parallel backward, start segment.
    std::vector<Point2> loop(strip.base.begin(), strip.base.end());
    loop.insert(loop.end(), strip.parallel.rbegin(), strip.parallel.rend());
    const std::size_t n = loop.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1) continue; // adjacent through the closing edge
            if (segments_cross(loop[i], loop[(i + 1) % n], loop[j], loop[(j + 1) % n])) return true;
        }
    }
    return false;
}

void write_embedding_csv(std::ostream& out, const StripEmbedding& strip) {
    out << "s,x_base,y_base,x_parallel,y_parallel\n";
    char buf[160];
    for (std::size_t i = 0; i < strip.s.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g,%.12g\n", strip.s[i], strip.base[i].x,
                      strip.base[i].y, strip.parallel[i].x, strip.parallel[i].y);
        out << buf;
    }
}

} // namespace dnstrip

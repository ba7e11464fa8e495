#include "dnstrip/cli.hpp"

#include "dnstrip/analysis.hpp"
#include "dnstrip/coefficients.hpp"
#include "dnstrip/errors.hpp"
#include "dnstrip/report.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

namespace dnstrip::cli {

namespace {

using nlohmann::json;

struct Options {
    std::string profile = "gaussian_dip:1,0,1";
    std::string interval = "-6,6";
    std::string truncated = "auto";
    std::string eps_list = "0.2,0.1,0.05,0.025";
    double eps = 0.1;
    std::string grid = "128,8,3";
    int j_max = 2;
    int m = 3;
    int ns_1d = 2048;
    std::string bc = "dn";
    std::string alpha = "0";
    double tol = 1e-8;
    double sigma = std::numeric_limits<double>::quiet_NaN();
    double k = std::numeric_limits<double>::quiet_NaN();
    std::string c_list = "0";
    double nu_tol = 1e-9;
    double margin = 0.0;
    double radius = 1.0;
    double theta = std::numbers::pi;
    std::string side = "outer";
    int m_max = 3;
    int points = 512;
    double limit_tol = 0.05;
    std::string out;
    std::string json_path;
    int workers = 1;
};

std::vector<double> parse_list(const std::string& text, const std::string& what) {
    std::vector<double> v;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        char* end = nullptr;
        const double x = std::strtod(item.c_str(), &end);
        if (item.empty() || end == item.c_str() || *end != '\0' || !std::isfinite(x))
            throw InvalidInput(what + ": cannot parse '" + item + "'");
        v.push_back(x);
    }
    if (v.empty()) throw InvalidInput(what + " is empty");
    return v;
}

Interval parse_interval(const Options& o, std::string_view profile_name) {
    const auto v = parse_list(o.interval, "interval");
    if (v.size() != 2) throw InvalidInput("interval needs two numbers a,b");
    bool truncated;
    if (o.truncated == "auto")
        truncated = profile_name.starts_with("gaussian_dip");
    else if (o.truncated == "yes")
        truncated = true;
    else if (o.truncated == "no")
        truncated = false;
    else
        throw InvalidInput("truncated must be auto, yes or no");
    return make_interval(v[0], v[1], truncated);
}

CurvatureProfile profile_of(const Options& o) {
    const std::string name = o.profile.substr(0, o.profile.find(':'));
    return parse_profile(o.profile, parse_interval(o, name));
}

GridSpec grid_of(const Options& o) {
    const auto v = parse_list(o.grid, "grid");
    if (v.size() < 2 || v.size() > 3) throw InvalidInput("grid needs Ns,Nt or Ns,Nt,levels");
    for (double x : v)
        if (x != std::floor(x) || x < 1) throw InvalidInput("grid entries must be positive integers");
    GridSpec g;
    g.Ns = static_cast<int>(v[0]);
    g.Nt = static_cast<int>(v[1]);
    g.levels = v.size() == 3 ? static_cast<int>(v[2]) : 3;
    return g;
}

ScalarFunction alpha_of(const Options& o, const Interval& I) {
    char* end = nullptr;
    const double c = std::strtod(o.alpha.c_str(), &end);
    if (!o.alpha.empty() && end != o.alpha.c_str() && *end == '\0') {
        if (!std::isfinite(c)) throw InvalidInput("alpha must be finite");
        return [c](double) { return c; };
    }
    const CurvatureProfile law = parse_profile(o.alpha, I);
    return law.kappa;
}

BoundaryConditionSet bc_of(const Options& o, const Interval& I) {
    if (o.bc == "dn") return BoundaryConditionSet::dirichlet_neumann();
    if (o.bc == "dd") return BoundaryConditionSet::dirichlet_dirichlet();
    if (o.bc == "robin") return BoundaryConditionSet::dirichlet_robin(alpha_of(o, I));
    throw InvalidInput("bc must be dn, dd or robin");
}

SweepSettings settings_of(const Options& o) {
    SweepSettings s;
    s.eps_list = parse_list(o.eps_list, "eps");
    s.j_max = o.j_max;
    s.grids = grid_of(o);
    s.ns_1d = o.ns_1d;
    s.workers = o.workers;
    s.eigen.tol = o.tol;
    return s;
}

EigenOptions eigen_of(const Options& o) {
    EigenOptions e;
    e.tol = o.tol;
    if (!std::isnan(o.sigma)) e.sigma = o.sigma;
    return e;
}

// Writes to the named file, or to `fallback` when the name is empty.
void emit(const std::string& path, std::ostream& fallback, const std::function<void(std::ostream&)>& body) {
    if (path.empty()) {
        body(fallback);
        return;
    }
    std::ofstream f(path);
    if (!f) throw InvalidInput("cannot open output file '" + path + "'");
    body(f);
    if (!f) throw InvalidInput("failed writing '" + path + "'");
}

void emit_json(const Options& o, const json& summary) {
    if (o.json_path.empty()) return;
    std::ofstream f(o.json_path);
    if (!f) throw InvalidInput("cannot open output file '" + o.json_path + "'");
    f << summary.dump(2) << '\n';
}

json limit_json(const LimitFit& f, double expected) {
    return {{"limit", f.limit},
            {"slope", f.slope},
            {"last_value", f.last_value},
            {"points", f.points},
            {"fitted_error", f.fitted_error},
            {"expected", expected},
            {"model", "L + c sqrt(eps), last three points (heuristic rate)"}};
}

bool any_trusted(const std::vector<SweepRecord>& records) {
    for (const auto& r : records)
        for (bool t : r.trusted)
            if (t) return true;
    return false;
}

json sweep_summary(const std::vector<SweepRecord>& records, const std::vector<LimitFit>& limits, double expected,
                   double limit_tol) {
    json s = {{"limits", json::object()}, {"verdicts", json::object()}, {"fitted_exponents", json::object()}};
    for (std::size_t j = 0; j < limits.size(); ++j) {
        const std::string key = "j" + std::to_string(j + 1);
        s["limits"][key] = limit_json(limits[j], expected);
        s["verdicts"]["limit_" + key] =
            std::abs(limits[j].limit - expected) <= limit_tol && limits[j].fitted_error <= 0.1 * limit_tol;
    }
    const auto verdicts = remainder_verdicts(records, static_cast<int>(limits.size()));
    for (const auto& v : verdicts) {
        s["verdicts"]["remainder_j" + std::to_string(v.j)] = {
            {"spread", v.spread}, {"growth", v.growth}, {"trusted", v.trusted}};
    }
    return s;
}

int finish_sweep(const std::vector<SweepRecord>& records, std::ostream& err) {
    if (!any_trusted(records)) {
        err << "error: no sweep record is trustworthy (discretization error dominates); refine the grid\n";
        return 1;
    }
    return 0;
}

std::string canonical_config(const CLI::App* sub) {
    std::stringstream in(sub->config_to_str(true, false)), out;
    out << sub->get_name() << '\n';
    std::string line;
    while (std::getline(in, line)) {
        if (line.starts_with("out=") || line.starts_with("json=") || line.starts_with("workers=")) continue;
        out << line << '\n';
    }
    return out.str();
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Spectral experiments on thin Dirichlet-Neumann strips", "dnstrip"};
    app.set_config("--config", "", "INI file with one [section] per subcommand; flags override it");
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));
    Options o;

    auto add_profile = [&](CLI::App* s) {
        s->add_option("--profile", o.profile, "zero | constant:c | gaussian_dip:a,s0,w | negcos")->capture_default_str();
        s->add_option("--interval", o.interval, "a,b")->capture_default_str();
        s->add_option("--truncated", o.truncated, "auto | yes | no (interval stands in for the real line)")
            ->capture_default_str();
    };
    auto add_outputs = [&](CLI::App* s) {
        s->add_option("--out", o.out, "output file (default: stdout)");
        s->add_option("--json", o.json_path, "JSON summary file");
        s->add_option("--workers", o.workers, "concurrent sweep points")->capture_default_str()->check(CLI::PositiveNumber);
    };
    auto add_sweep = [&](CLI::App* s) {
        add_profile(s);
        s->add_option("--eps", o.eps_list, "strictly decreasing list")->capture_default_str();
        s->add_option("--jmax", o.j_max, "eigenvalues per width")->capture_default_str()->check(CLI::PositiveNumber);
        s->add_option("--grid", o.grid, "Ns,Nt[,levels] of the coarsest grid")->capture_default_str();
        s->add_option("--ns1d", o.ns_1d, "coarsest 1D reference grid")->capture_default_str();
        s->add_option("--tol", o.tol, "eigensolver tolerance")->capture_default_str();
        add_outputs(s);
    };

    auto* spectrum = app.add_subcommand("spectrum", "lowest eigenvalues of the strip on one grid");
    add_profile(spectrum);
    spectrum->add_option("--eps", o.eps, "width")->capture_default_str();
    spectrum->add_option("--grid", o.grid, "Ns,Nt")->capture_default_str();
    spectrum->add_option("--m", o.m, "number of eigenvalues")->capture_default_str();
    spectrum->add_option("--bc", o.bc, "dn | dd | robin")->capture_default_str();
    spectrum->add_option("--alpha", o.alpha, "Robin coefficient: number or profile spec")->capture_default_str();
    spectrum->add_option("--tol", o.tol, "eigensolver tolerance")->capture_default_str();
    spectrum->add_option("--sigma", o.sigma, "shift (default: below the spectrum)");
    add_outputs(spectrum);

    auto* sweep = app.add_subcommand("sweep", "eps sweep of the scaled eigenvalues and the 1D comparison");
    add_sweep(sweep);
    sweep->add_option("--limit-tol", o.limit_tol, "band for the extrapolated limit")->capture_default_str();

    auto* dirichlet = app.add_subcommand("dirichlet", "Dirichlet-Dirichlet comparison with -kappa^2/4");
    add_sweep(dirichlet);

    auto* robin = app.add_subcommand("robin", "Robin outer condition sweep");
    add_sweep(robin);
    robin->add_option("--alpha", o.alpha, "number or profile spec")->capture_default_str();
    robin->add_option("--limit-tol", o.limit_tol, "band for the extrapolated limit")->capture_default_str();

    auto* transverse = app.add_subcommand("transverse", "nu(c), lowest eigenvalue of the transverse problem");
    transverse->add_option("--c", o.c_list, "comma-separated values < 1")->capture_default_str();
    transverse->add_option("--tol", o.nu_tol, "extrapolation tolerance")->capture_default_str();
    transverse->add_option("--out", o.out, "output file (default: stdout)");

    auto* effective = app.add_subcommand("effective1d", "eigenvalues of the effective 1D operator");
    add_profile(effective);
    effective->add_option("--eps", o.eps, "width")->capture_default_str();
    effective->add_option("--bc", o.bc, "dn | dd | robin")->capture_default_str();
    effective->add_option("--alpha", o.alpha, "Robin coefficient")->capture_default_str();
    effective->add_option("--m", o.m, "number of eigenvalues")->capture_default_str();
    effective->add_option("--ns1d", o.ns_1d, "coarsest grid")->capture_default_str();
    effective->add_option("--out", o.out, "output file (default: stdout)");

    auto* resolvent = app.add_subcommand("resolvent", "norm of the resolvent difference against eps");
    add_profile(resolvent);
    resolvent->add_option("--eps", o.eps_list, "strictly decreasing list")->capture_default_str();
    resolvent->add_option("--k", o.k, "shift (default 1 + 2 max(0, -inf kappa))");
    resolvent->add_option("--grid", o.grid, "Ns,Nt[,levels]; the finest level is used")->capture_default_str();
    add_outputs(resolvent);

    auto* count = app.add_subcommand("count", "number of eigenvalues below the transverse threshold");
    add_profile(count);
    count->add_option("--eps", o.eps, "width")->capture_default_str();
    count->add_option("--grid", o.grid, "Ns,Nt[,levels]")->capture_default_str();
    count->add_option("--margin", o.margin, "gap below the threshold (default: 10x error of lambda_1)");
    count->add_option("--out", o.out, "output file (default: stdout)");

    auto* oracle = app.add_subcommand("oracle", "annular-sector eigenvalues from Bessel cross products");
    oracle->add_option("--R", o.radius, "radius of the Dirichlet circle")->capture_default_str();
    oracle->add_option("--eps", o.eps, "width")->capture_default_str();
    oracle->add_option("--theta", o.theta, "opening angle")->capture_default_str();
    oracle->add_option("--side", o.side, "outer | inner: where the Dirichlet circle lies")->capture_default_str();
    oracle->add_option("--m", o.m_max, "angular orders")->capture_default_str();
    oracle->add_option("--out", o.out, "output file (default: stdout)");

    auto* embed_cmd = app.add_subcommand("embed", "reference and parallel curves as CSV");
    add_profile(embed_cmd);
    embed_cmd->add_option("--eps", o.eps, "width")->capture_default_str();
    embed_cmd->add_option("--points", o.points, "samples along the curve")->capture_default_str();
    embed_cmd->add_option("--out", o.out, "output file (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    const CLI::App* chosen = app.get_subcommands().front();
    const std::string prov = provenance_line(canonical_config(chosen));

    try {
        if (chosen == spectrum) {
            const CurvatureProfile p = profile_of(o);
            const GridSpec g = grid_of(o);
            const StripProblem problem{p, o.eps, bc_of(o, p.interval)};
            const Spectrum s = strip_spectrum(problem, build_grid(p.interval, g.Ns, g.Nt), o.m, eigen_of(o));
            emit(o.out, out, [&](std::ostream& f) { write_spectrum_csv(f, s, prov); });
            emit_json(o, {{"limits", json::object()},
                          {"verdicts", {{"converged", true}}},
                          {"fitted_exponents", json::object()},
                          {"eigenvalues", s.eigenvalues},
                          {"threshold", transverse_threshold(problem.bc.variant(), o.eps)}});
            return 0;
        }
        if (chosen == sweep) {
            const CurvatureProfile p = profile_of(o);
            const SweepSettings s = settings_of(o);
            const Thm2Result r = check_thm2(p, s);
            emit(o.out, out, [&](std::ostream& f) { write_sweep_csv(f, r.records, prov); });
            emit_json(o, sweep_summary(r.records, fit_limits(r.records, s.j_max), p.inf_kappa, o.limit_tol));
            return finish_sweep(r.records, err);
        }
        if (chosen == dirichlet) {
            const CurvatureProfile p = profile_of(o);
            const SweepSettings s = settings_of(o);
            const DirichletResult r = dirichlet_compare(p, s);
            emit(o.out, out, [&](std::ostream& f) { write_sweep_csv(f, r.records, prov); });
            json summary = {{"limits", json::object()}, {"verdicts", json::object()}, {"fitted_exponents", json::object()}};
            for (std::size_t j = 0; j < r.decreasing.size(); ++j)
                summary["verdicts"]["decreasing_j" + std::to_string(j + 1)] = static_cast<bool>(r.decreasing[j]);
            emit_json(o, summary);
            return finish_sweep(r.records, err);
        }
        if (chosen == robin) {
            const CurvatureProfile p = profile_of(o);
            const SweepSettings s = settings_of(o);
            const RobinResult r = robin_sweep(p, alpha_of(o, p.interval), s);
            emit(o.out, out, [&](std::ostream& f) { write_sweep_csv(f, r.records, prov); });
            emit_json(o, sweep_summary(r.records, r.limits, r.expected_limit, o.limit_tol));
            return finish_sweep(r.records, err);
        }
        if (chosen == transverse) {
            const auto cs = parse_list(o.c_list, "c");
            emit(o.out, out, [&](std::ostream& f) {
                f << prov << '\n';
                for (double c : cs)
                    f << "nu(" << format_number(c) << ") = " << format_number(transverse_nu(c, o.nu_tol)) << " +- "
                      << format_number(o.nu_tol) << '\n';
            });
            return 0;
        }
        if (chosen == effective) {
            const CurvatureProfile p = profile_of(o);
            const BoundaryConditionSet bc = bc_of(o, p.interval);
            const EffectivePotential V = effective_potential(p, o.eps, bc.variant(), bc.alpha);
            const Extrapolated e = effective_spectrum(V.value, p.interval, o.m, o.ns_1d);
            emit(o.out, out, [&](std::ostream& f) {
                f << prov << '\n' << "j,lambda,disc_err\n";
                for (std::size_t j = 0; j < e.value.size(); ++j)
                    f << j + 1 << ',' << format_number(e.value[j]) << ',' << format_number(e.error[j]) << '\n';
            });
            return 0;
        }
        if (chosen == resolvent) {
            const CurvatureProfile p = profile_of(o);
            const double k = std::isnan(o.k) ? default_shift_k(p) : o.k;
            const GapSweep g = resolvent_gap_sweep(p, k, parse_list(o.eps_list, "eps"), grid_of(o), o.workers);
            emit(o.out, out, [&](std::ostream& f) { write_gap_csv(f, g, prov); });
            emit_json(o, {{"limits", json::object()},
                          {"verdicts", {{"ratio_spread", g.ratio_spread}}},
                          {"fitted_exponents", {{"gap", g.fitted_exponent}}}});
            return 0;
        }
        if (chosen == count) {
            const CurvatureProfile p = profile_of(o);
            const BoundStateCount c = count_bound_states({p, o.eps}, grid_of(o), o.margin);
            emit(o.out, out, [&](std::ostream& f) {
                f << prov << '\n' << "eps,count,threshold,margin,lambda1,lambda1_err\n";
                f << format_number(o.eps) << ',' << c.count << ',' << format_number(c.threshold) << ','
                  << format_number(c.margin) << ',' << format_number(c.lambda1) << ','
                  << format_number(c.lambda1_error) << '\n';
            });
            return 0;
        }
        if (chosen == oracle) {
            if (o.side != "outer" && o.side != "inner") throw InvalidInput("side must be outer or inner");
            const auto side = o.side == "outer" ? AnnulusSide::DirichletOuter : AnnulusSide::DirichletInner;
            const auto values = annulus_oracle(o.radius, o.eps, o.theta, side, o.m_max);
            emit(o.out, out, [&](std::ostream& f) {
                f << prov << '\n' << "# j0_first_zero=" << format_number(bessel_j0_first_zero()) << '\n'
                  << "j,k_squared\n";
                for (std::size_t j = 0; j < values.size(); ++j) f << j + 1 << ',' << format_number(values[j]) << '\n';
            });
            return 0;
        }
        if (chosen == embed_cmd) {
            const CurvatureProfile p = profile_of(o);
            const StripEmbedding e = embed(p, o.eps, o.points);
            if (has_self_intersection(e)) err << "warning: sampled strip boundary self-intersects\n";
            emit(o.out, out, [&](std::ostream& f) {
                f << prov << '\n';
                write_embedding_csv(f, e);
            });
            return 0;
        }
    } catch (const InvalidInput& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

} // namespace dnstrip::cli

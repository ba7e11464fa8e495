#include "dnstrip/analysis.hpp"
#include "dnstrip/cli.hpp"
#include "dnstrip/errors.hpp"
#include "dnstrip/geometry.hpp"

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace dnstrip;

namespace {

CurvatureProfile profile_from(const std::string& spec, double a, double b, bool truncated) {
    return parse_profile(spec, make_interval(a, b, truncated));
}

py::list records_to_list(const std::vector<SweepRecord>& records) {
    py::list out;
    for (const auto& r : records) {
        py::dict d;
        d["eps"] = r.eps;
        d["threshold"] = r.threshold;
        d["lambda_strip"] = r.lambda_strip;
        d["lambda_1d"] = r.lambda_1d;
        d["remainder_thm2"] = r.remainder_thm2;
        d["scaled_thm1"] = r.scaled_thm1;
        d["disc_err"] = r.disc_err;
        d["trusted"] = std::vector<bool>(r.trusted.begin(), r.trusted.end());
        out.append(d);
    }
    return out;
}

SweepSettings settings(std::vector<double> eps, int j_max, int ns, int nt, int levels) {
    SweepSettings s;
    s.eps_list = std::move(eps);
    s.j_max = j_max;
    s.grids.Ns = ns;
    s.grids.Nt = nt;
    s.grids.levels = levels;
    return s;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Spectral experiments on thin Dirichlet-Neumann strips";

    py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
    py::register_exception<NumericalFailure>(m, "NumericalFailure", PyExc_RuntimeError);

    py::class_<CurvatureProfile>(m, "CurvatureProfile")
        .def_readonly("name", &CurvatureProfile::name)
        .def_readonly("params", &CurvatureProfile::params)
        .def_readonly("inf_kappa", &CurvatureProfile::inf_kappa)
        .def_readonly("sup_kappa", &CurvatureProfile::sup_kappa)
        .def("__call__", [](const CurvatureProfile& p, double s) { return p.kappa(s); });

    m.def("profile", &profile_from, py::arg("spec"), py::arg("a"), py::arg("b"), py::arg("truncated") = false,
          "Curvature profile from a spec such as 'gaussian_dip:1,0,1' or 'negcos'.");

    m.def(
        "strip_eigenvalues",
        [](const CurvatureProfile& p, double eps, int ns, int nt, int m, const std::string& bc, double alpha) {
            BoundaryConditionSet set;
            if (bc == "dd")
                set = BoundaryConditionSet::dirichlet_dirichlet();
            else if (bc == "robin")
                set = BoundaryConditionSet::dirichlet_robin([alpha](double) { return alpha; });
            else if (bc != "dn")
                throw InvalidInput("bc must be dn, dd or robin");
            return strip_spectrum({p, eps, set}, build_grid(p.interval, ns, nt), m).eigenvalues;
        },
        py::arg("profile"), py::arg("eps"), py::arg("ns"), py::arg("nt"), py::arg("m") = 3, py::arg("bc") = "dn",
        py::arg("alpha") = 0.0);

    m.def("transverse_nu", &transverse_nu, py::arg("c"), py::arg("tol") = 1e-9);

    m.def(
        "effective_eigenvalues",
        [](const CurvatureProfile& p, double eps, int m, int ns) {
            const EffectivePotential V = effective_potential(p, eps, BoundaryVariant::DN);
            const Extrapolated e = effective_spectrum(V.value, p.interval, m, ns);
            return py::make_tuple(e.value, e.error);
        },
        py::arg("profile"), py::arg("eps"), py::arg("m") = 2, py::arg("ns") = 2048);

    m.def(
        "sweep",
        [](const CurvatureProfile& p, std::vector<double> eps, int j_max, int ns, int nt, int levels) {
            return records_to_list(check_thm2(p, settings(std::move(eps), j_max, ns, nt, levels)).records);
        },
        py::arg("profile"), py::arg("eps"), py::arg("j_max") = 2, py::arg("ns") = 64, py::arg("nt") = 8,
        py::arg("levels") = 3);

    m.def(
        "resolvent_gaps",
        [](const CurvatureProfile& p, std::vector<double> eps, double k, int ns, int nt) {
            GridSpec g;
            g.Ns = ns;
            g.Nt = nt;
            g.levels = 2;
            const GapSweep s = resolvent_gap_sweep(p, k, eps, g);
            std::vector<double> gaps;
            for (const auto& q : s.points) gaps.push_back(q.gap);
            return py::make_tuple(gaps, s.fitted_exponent);
        },
        py::arg("profile"), py::arg("eps"), py::arg("k") = 1.0, py::arg("ns") = 32, py::arg("nt") = 4);

    m.def(
        "count_bound_states",
        [](const CurvatureProfile& p, double eps, int ns, int nt, int levels) {
            GridSpec g;
            g.Ns = ns;
            g.Nt = nt;
            g.levels = levels;
            return count_bound_states({p, eps}, g).count;
        },
        py::arg("profile"), py::arg("eps"), py::arg("ns") = 64, py::arg("nt") = 8, py::arg("levels") = 2);

    m.def(
        "annulus_eigenvalues",
        [](double R, double eps, double theta, bool dirichlet_outer, int m_max) {
            return annulus_oracle(R, eps, theta, dirichlet_outer ? AnnulusSide::DirichletOuter
                                                                 : AnnulusSide::DirichletInner,
                                  m_max);
        },
        py::arg("R"), py::arg("eps"), py::arg("theta"), py::arg("dirichlet_outer") = true, py::arg("m_max") = 3);

    m.def("bessel_j0_first_zero", &bessel_j0_first_zero);

    m.def(
        "run_cli",
        [](std::vector<std::string> args) {
            args.insert(args.begin(), "dnstrip");
            std::vector<const char*> argv;
            for (const auto& a : args) argv.push_back(a.c_str());
            std::ostringstream out, err;
            const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs the command-line tool; returns (exit_code, stdout, stderr).");
}

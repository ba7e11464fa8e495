#include "dnstrip/discretize.hpp"

#include "dnstrip/errors.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

namespace dnstrip {

namespace {

struct QuadratureRule {
    std::vector<double> x; // on [0, 1]
    std::vector<double> w; // sums to 1
};

template <unsigned N>
QuadratureRule boost_rule() {
    using G = boost::math::quadrature::gauss<double, N>;
    const auto& abs = G::abscissa();
    const auto& wts = G::weights();
    QuadratureRule r;
    for (std::size_t k = 0; k < abs.size(); ++k) {
        if (abs[k] == 0.0) {
            r.x.push_back(0.5);
            r.w.push_back(0.5 * wts[k]);
        } else {
            r.x.push_back(0.5 - 0.5 * abs[k]);
            r.w.push_back(0.5 * wts[k]);
            r.x.push_back(0.5 + 0.5 * abs[k]);
            r.w.push_back(0.5 * wts[k]);
        }
    }
    return r;
}

QuadratureRule gauss_rule(int n) {
    switch (n) {
    case 1: return {{0.5}, {1.0}};
    case 2: return boost_rule<2>();
    case 3: return boost_rule<3>();
    case 4: return boost_rule<4>();
    case 5: return boost_rule<5>();
    case 6: return boost_rule<6>();
    case 7: return boost_rule<7>();
    case 8: return boost_rule<8>();
    default: throw InvalidInput("gauss_points must be in 1..8");
    }
}

// Coefficients of a bilinear-element integrand at one quadrature point:
//   ds_ds * dN_a/ds dN_b/ds + dt_dt * dN_a/dt dN_b/dt + mass_a * N_a N_b
//   + cross * (N_a dN_b/ds + dN_a/ds N_b) / 2                      -> A
//   mass_m * N_a N_b                                                -> M
struct PointCoefficients {
    double ds_ds = 0.0;
    double dt_dt = 0.0;
    double mass_a = 0.0;
    double cross = 0.0;
    double mass_m = 0.0;
};

using CellIntegrand = std::function<PointCoefficients(double s, double t)>;
using EdgeIntegrand = std::function<double(double s)>;

// Optional smooth factor g multiplying every hat function: value, d/ds, d/dt.
struct WeightValue {
    double g = 1.0;
    double gs = 0.0;
    double gt = 0.0;
};
using BasisWeight = std::function<WeightValue(double s, double t)>;

GeneralizedPencil assemble_2d(const TensorGrid& grid, OuterCondition outer, const CellIntegrand& cell,
                              const EdgeIntegrand& edge, int gauss_points, const BasisWeight& weight = {}) {
    const DofLayout layout(grid, outer);
    if (layout.size() == 0) throw InvalidInput("grid has no free degrees of freedom");
    const QuadratureRule q = gauss_rule(gauss_points);
    const double hs = grid.hs(), ht = grid.ht();

    GeneralizedPencil p{SymBandMatrix(layout.size(), layout.half_bandwidth()),
                        SymBandMatrix(layout.size(), layout.half_bandwidth()), {}};

    std::array<double, 16> ka{}, km{};
    for (int i = 0; i < grid.Ns; ++i) {
        for (int j = 0; j < grid.Nt; ++j) {
            ka.fill(0.0);
            km.fill(0.0);
            for (std::size_t qs = 0; qs < q.x.size(); ++qs) {
                const double xi = q.x[qs];
                const double s = grid.s_nodes[i] + xi * hs;
                const std::array<double, 2> Ls{1.0 - xi, xi};
                const std::array<double, 2> dLs{-1.0 / hs, 1.0 / hs};
                for (std::size_t qt = 0; qt < q.x.size(); ++qt) {
                    const double eta = q.x[qt];
                    const double t = grid.t_nodes[j] + eta * ht;
                    const std::array<double, 2> Lt{1.0 - eta, eta};
                    const std::array<double, 2> dLt{-1.0 / ht, 1.0 / ht};
                    const double wq = q.w[qs] * q.w[qt] * hs * ht;
                    const PointCoefficients c = cell(s, t);

                    const WeightValue g = weight ? weight(s, t) : WeightValue{};
                    std::array<double, 4> N{}, Ns{}, Nt{};
                    for (int a = 0; a < 4; ++a) {
                        const int as = a & 1, at = a >> 1;
                        const double n0 = Ls[as] * Lt[at];
                        N[a] = g.g * n0;
                        Ns[a] = g.g * dLs[as] * Lt[at] + g.gs * n0;
                        Nt[a] = g.g * Ls[as] * dLt[at] + g.gt * n0;
                    }
                    for (int a = 0; a < 4; ++a) {
                        for (int b = 0; b < 4; ++b) {
                            ka[a * 4 + b] += wq * (c.ds_ds * Ns[a] * Ns[b] + c.dt_dt * Nt[a] * Nt[b] +
                                                   c.mass_a * N[a] * N[b] +
                                                   0.5 * c.cross * (N[a] * Ns[b] + Ns[a] * N[b]));
                            km[a * 4 + b] += wq * c.mass_m * N[a] * N[b];
                        }
                    }
                }
            }
            std::array<long, 4> dof{};
            for (int a = 0; a < 4; ++a) dof[a] = layout.index(i + (a & 1), j + (a >> 1));
            for (int a = 0; a < 4; ++a) {
                if (dof[a] < 0) continue;
                for (int b = 0; b <= a; ++b) {
                    if (dof[b] < 0) continue;
                    // Local pairs (a, b) with a > b map to the lower triangle only once.
                    const double va = a == b ? ka[a * 4 + b] : ka[a * 4 + b] + ka[b * 4 + a];
                    const double vm = a == b ? km[a * 4 + b] : km[a * 4 + b] + km[b * 4 + a];
                    p.A.add(dof[a], dof[b], a == b ? va : 0.5 * va);
                    p.M.add(dof[a], dof[b], a == b ? vm : 0.5 * vm);
                }
            }
        }
    }

    if (edge && outer != OuterCondition::Dirichlet) {
        for (int i = 0; i < grid.Ns; ++i) {
            std::array<double, 4> ke{};
            for (std::size_t qs = 0; qs < q.x.size(); ++qs) {
                const double xi = q.x[qs];
                const double s = grid.s_nodes[i] + xi * hs;
                const std::array<double, 2> Ls{1.0 - xi, xi};
                const double g = weight ? weight(s, 1.0).g : 1.0;
                const double wv = q.w[qs] * hs * edge(s) * g * g;
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b) ke[a * 2 + b] += wv * Ls[a] * Ls[b];
            }
            const std::array<long, 2> dof{layout.index(i, grid.Nt), layout.index(i + 1, grid.Nt)};
            for (int a = 0; a < 2; ++a) {
                if (dof[a] < 0) continue;
                for (int b = 0; b <= a; ++b) {
                    if (dof[b] < 0) continue;
                    p.A.add(dof[a], dof[b], ke[a * 2 + b]);
                }
            }
        }
    }

    p.meta.outer = outer;
    p.meta.Ns = grid.Ns;
    p.meta.Nt = grid.Nt;
    const double L = grid.interval.length(), a0 = grid.interval.a;
    p.meta.trial = interpolate(grid, outer, [&](double s, double t) {
        const double phi = std::sin(std::numbers::pi * (s - a0) / L);
        const double chi = outer == OuterCondition::Dirichlet ? std::sin(std::numbers::pi * t)
                                                              : std::sin(0.5 * std::numbers::pi * t);
        return phi * chi;
    });
    return p;
}

BasisWeight sqrt_jacobian(const CurvatureProfile& profile, double eps) {
    if (!profile.has_kappa_prime()) throw InvalidInput("mapped basis needs the curvature derivative");
    return [&profile, eps](double s, double t) {
        const double k = profile.kappa(s);
        const double g = std::sqrt(1.0 - k * eps * t);
        return WeightValue{g, -0.5 * profile.kappa_prime(s) * eps * t / g, -0.5 * k * eps / g};
    };
}

void check_eps(double eps) {
    if (!std::isfinite(eps) || eps <= 0.0) throw InvalidInput("eps must be positive");
}

void check_shift_k(const CurvatureProfile& profile, double k) {
    if (!std::isfinite(k) || !(k > -profile.inf_kappa))
        throw InvalidInput("shift k must satisfy k > -inf kappa");
}

} // namespace

TensorGrid build_grid(Interval interval, int Ns, int Nt) {
    if (Ns < 2 || Nt < 2) throw InvalidInput("grid needs Ns >= 2 and Nt >= 2");
    interval = make_interval(interval.a, interval.b, interval.truncated);
    TensorGrid g;
    g.interval = interval;
    g.Ns = Ns;
    g.Nt = Nt;
    g.s_nodes.resize(Ns + 1);
    g.t_nodes.resize(Nt + 1);
    for (int i = 0; i <= Ns; ++i) g.s_nodes[i] = interval.a + interval.length() * i / Ns;
    for (int j = 0; j <= Nt; ++j) g.t_nodes[j] = static_cast<double>(j) / Nt;
    g.s_nodes.back() = interval.b;
    return g;
}

BoundaryVariant BoundaryConditionSet::variant() const {
    switch (outer) {
    case OuterCondition::Neumann: return BoundaryVariant::DN;
    case OuterCondition::Robin: return BoundaryVariant::Robin;
    case OuterCondition::Dirichlet: return BoundaryVariant::Dirichlet;
    }
    return BoundaryVariant::DN;
}

DofLayout::DofLayout(const TensorGrid& grid, OuterCondition outer)
    : ns_free(grid.Ns - 1), nt_free(outer == OuterCondition::Dirichlet ? grid.Nt - 1 : grid.Nt) {}

long DofLayout::index(int i, int j) const {
    if (i < 1 || i > ns_free || j < 1 || j > nt_free) return -1;
    return static_cast<long>(i - 1) * nt_free + (j - 1);
}

std::string to_string(FormKind kind) {
    switch (kind) {
    case FormKind::Weighted: return "weighted";
    case FormKind::Flat: return "flat";
    case FormKind::Reference: return "reference";
    case FormKind::OneDimensional: return "1d";
    case FormKind::Transverse: return "transverse";
    }
    return "?";
}

std::vector<double> interpolate(const TensorGrid& grid, OuterCondition outer,
                                const std::function<double(double, double)>& f) {
    const DofLayout layout(grid, outer);
    std::vector<double> v(layout.size());
    for (int i = 1; i <= layout.ns_free; ++i)
        for (int j = 1; j <= layout.nt_free; ++j) v[layout.index(i, j)] = f(grid.s_nodes[i], grid.t_nodes[j]);
    return v;
}

GeneralizedPencil assemble_weighted(const CurvatureProfile& profile, double eps, const BoundaryConditionSet& bc,
                                    const TensorGrid& grid, const AssemblyOptions& options) {
    check_eps(eps);
    require_admissible(profile, eps);
    if (bc.outer == OuterCondition::Robin && !bc.alpha) throw InvalidInput("Robin condition needs alpha");

    const auto& kappa = profile.kappa;
    const double inv_eps2 = 1.0 / (eps * eps);
    auto cell = [&](double s, double t) {
        const double h = 1.0 - kappa(s) * eps * t;
        PointCoefficients c;
        c.ds_ds = 1.0 / h;
        c.dt_dt = h * inv_eps2;
        c.mass_m = h;
        return c;
    };
    EdgeIntegrand edge;
    if (bc.outer == OuterCondition::Robin) {
        edge = [&](double s) { return bc.alpha(s) * (1.0 - kappa(s) * eps) / eps; };
    }
    GeneralizedPencil p = assemble_2d(grid, bc.outer, cell, edge, options.gauss_points);
    p.meta.form = FormKind::Weighted;
    p.meta.eps = eps;
    return p;
}

GeneralizedPencil assemble_flat(const CurvatureProfile& profile, double eps, const BoundaryConditionSet& bc,
                                const TensorGrid& grid, std::optional<double> shift_k,
                                const AssemblyOptions& options) {
    check_eps(eps);
    if (bc.outer != OuterCondition::Neumann) throw InvalidInput("flat assembly supports Dirichlet-Neumann only");
    if (!profile.has_kappa_prime()) throw InvalidInput("flat assembly needs the curvature derivative");
    require_admissible(profile, eps);
    if (shift_k) check_shift_k(profile, *shift_k);

    const double inv_eps2 = 1.0 / (eps * eps);
    auto cell = [&](double s, double t) {
        const CoefficientPoint v = potentials(profile, eps, s, t);
        PointCoefficients c;
        c.ds_ds = 1.0 / (v.h * v.h);
        c.dt_dt = inv_eps2;
        c.mass_a = v.v1 - v.v3;
        c.cross = v.v2;
        c.mass_m = 1.0;
        return c;
    };
    auto edge = [&](double s) {
        const double k = profile.kappa(s);
        return 0.5 * k / (eps * (1.0 - eps * k));
    };
    GeneralizedPencil p = assemble_2d(grid, OuterCondition::Neumann, cell, edge, options.gauss_points,
                                      options.mapped_basis ? sqrt_jacobian(profile, eps) : BasisWeight{});
    if (shift_k) {
        const double shift = transverse_threshold(BoundaryVariant::DN, eps) - *shift_k / eps;
        p.A = p.A.plus_scaled(p.M, -shift);
    }
    p.meta.form = FormKind::Flat;
    p.meta.eps = eps;
    p.meta.shift_k = shift_k;
    p.meta.mapped_basis = options.mapped_basis;
    return p;
}

GeneralizedPencil assemble_reference(const CurvatureProfile& profile, double eps, const TensorGrid& grid, double k,
                                     const AssemblyOptions& options) {
    check_eps(eps);
    check_shift_k(profile, k);
    if (options.mapped_basis) require_admissible(profile, eps);
    const double inv_eps2 = 1.0 / (eps * eps);
    const double transverse_floor = 0.25 * std::numbers::pi * std::numbers::pi * inv_eps2;
    auto cell = [&](double s, double) {
        PointCoefficients c;
        c.ds_ds = 1.0;
        c.dt_dt = inv_eps2;
        c.mass_a = (k + profile.kappa(s)) / eps - transverse_floor;
        c.mass_m = 1.0;
        return c;
    };
    GeneralizedPencil p = assemble_2d(grid, OuterCondition::Neumann, cell, {}, options.gauss_points,
                                      options.mapped_basis ? sqrt_jacobian(profile, eps) : BasisWeight{});
    p.meta.form = FormKind::Reference;
    p.meta.eps = eps;
    p.meta.shift_k = k;
    p.meta.mapped_basis = options.mapped_basis;
    return p;
}

GeneralizedPencil assemble_1d(const ScalarFunction& potential, Interval interval, int Ns,
                              const AssemblyOptions& options) {
    if (Ns < 2) throw InvalidInput("1D assembly needs Ns >= 2");
    if (!potential) throw InvalidInput("1D assembly needs a potential");
    interval = make_interval(interval.a, interval.b, interval.truncated);
    const QuadratureRule q = gauss_rule(options.gauss_points);
    const std::size_t n = static_cast<std::size_t>(Ns - 1);
    const double h = interval.length() / Ns;

    GeneralizedPencil p{SymBandMatrix(n, 1), SymBandMatrix(n, 1), {}};
    for (int i = 0; i < Ns; ++i) {
        const double s0 = interval.a + interval.length() * i / Ns;
        std::array<double, 4> ka{}, km{};
        for (std::size_t k = 0; k < q.x.size(); ++k) {
            const double xi = q.x[k];
            const std::array<double, 2> N{1.0 - xi, xi};
            const std::array<double, 2> dN{-1.0 / h, 1.0 / h};
            const double w = q.w[k] * h;
            const double V = potential(s0 + xi * h);
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) {
                    ka[a * 2 + b] += w * (dN[a] * dN[b] + V * N[a] * N[b]);
                    km[a * 2 + b] += w * N[a] * N[b];
                }
        }
        const std::array<long, 2> dof{i - 1L, (i + 1 <= Ns - 1) ? static_cast<long>(i) : -1L};
        for (int a = 0; a < 2; ++a) {
            if (dof[a] < 0) continue;
            for (int b = 0; b <= a; ++b) {
                if (dof[b] < 0) continue;
                p.A.add(dof[a], dof[b], ka[a * 2 + b]);
                p.M.add(dof[a], dof[b], km[a * 2 + b]);
            }
        }
    }
    p.meta.form = FormKind::OneDimensional;
    p.meta.Ns = Ns;
    p.meta.trial.resize(n);
    for (std::size_t i = 0; i < n; ++i) p.meta.trial[i] = std::sin(std::numbers::pi * double(i + 1) / Ns);
    return p;
}

GeneralizedPencil assemble_transverse(double c, int Nt) {
    if (!std::isfinite(c) || c >= 1.0) throw InvalidInput("transverse weight needs c < 1");
    if (Nt < 2) throw InvalidInput("transverse assembly needs Nt >= 2");
    const QuadratureRule q = gauss_rule(2);
    const std::size_t n = static_cast<std::size_t>(Nt);
    const double h = 1.0 / Nt;

    GeneralizedPencil p{SymBandMatrix(n, 1), SymBandMatrix(n, 1), {}};
    for (int j = 0; j < Nt; ++j) {
        std::array<double, 4> ka{}, km{};
        for (std::size_t k = 0; k < q.x.size(); ++k) {
            const double xi = q.x[k];
            const double t = (j + xi) * h;
            const std::array<double, 2> N{1.0 - xi, xi};
            const std::array<double, 2> dN{-1.0 / h, 1.0 / h};
            const double w = q.w[k] * h * (1.0 - c * t);
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) {
                    ka[a * 2 + b] += w * dN[a] * dN[b];
                    km[a * 2 + b] += w * N[a] * N[b];
                }
        }
        const std::array<long, 2> dof{j - 1L, static_cast<long>(j)};
        for (int a = 0; a < 2; ++a) {
            if (dof[a] < 0) continue;
            for (int b = 0; b <= a; ++b) {
                if (dof[b] < 0) continue;
                p.A.add(dof[a], dof[b], ka[a * 2 + b]);
                p.M.add(dof[a], dof[b], km[a * 2 + b]);
            }
        }
    }
    p.meta.form = FormKind::Transverse;
    p.meta.eps = c;
    p.meta.Nt = Nt;
    p.meta.trial.resize(n);
    for (std::size_t j = 0; j < n; ++j) p.meta.trial[j] = std::sin(0.5 * std::numbers::pi * double(j + 1) / Nt);
    return p;
}

void write_matrix_market(std::ostream& out, const SymBandMatrix& matrix) {
    const std::size_t n = matrix.size(), bw = matrix.half_bandwidth();
    std::size_t nnz = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i >= bw ? i - bw : 0; j <= i; ++j)
            if (matrix(i, j) != 0.0) ++nnz;
    out << "%%MatrixMarket matrix coordinate real symmetric\n" << n << ' ' << n << ' ' << nnz << '\n';
    char buf[96];
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i >= bw ? i - bw : 0; j <= i; ++j) {
            const double v = matrix(i, j);
            if (v == 0.0) continue;
            std::snprintf(buf, sizeof buf, "%zu %zu %.17g\n", i + 1, j + 1, v);
            out << buf;
        }
}

} // namespace dnstrip

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dense.hpp"

#include "dnstrip/discretize.hpp"
#include "dnstrip/errors.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

using namespace dnstrip;
using std::numbers::pi;

namespace {

/// Sums of the separated 1D spectra, ascending.
std::vector<double> kronecker_sums(const std::vector<double>& longitudinal, const std::vector<double>& transverse,
                                   double transverse_scale, double offset) {
    std::vector<double> v;
    for (double a : longitudinal)
        for (double b : transverse) v.push_back(a + transverse_scale * b + offset);
    std::sort(v.begin(), v.end());
    return v;
}

} // namespace

TEST_CASE("grid and dof layout") {
    const TensorGrid g = build_grid(make_interval(0, 2), 8, 4);
    CHECK(g.s_nodes.size() == 9);
    CHECK(g.t_nodes.size() == 5);
    CHECK(g.hs() == 0.25);
    const DofLayout dn(g, OuterCondition::Neumann);
    CHECK(dn.size() == 7 * 4);
    CHECK(dn.index(0, 2) == -1);
    CHECK(dn.index(3, 0) == -1);
    CHECK(dn.index(1, 1) == 0);
    CHECK(dn.index(1, 2) == 1);
    CHECK(dn.index(2, 1) == 4);
    const DofLayout dd(g, OuterCondition::Dirichlet);
    CHECK(dd.size() == 7 * 3);
    CHECK(dd.index(2, 4) == -1);
    CHECK_THROWS_AS(build_grid(make_interval(0, 1), 0, 4), InvalidInput);
}

TEST_CASE("straight strip pencils separate into 1D pencils") {
    const auto z = parse_profile("zero", make_interval(0, 1));
    const TensorGrid g = build_grid(z.interval, 10, 6);
    const double eps = 0.2;
    const auto ev_s = testing::dense_eigenvalues(assemble_1d([](double) { return 0.0; }, z.interval, 10));
    const auto ev_t = testing::dense_eigenvalues(assemble_transverse(0.0, 6));

    const auto weighted = testing::dense_eigenvalues(assemble_weighted(z, eps, {}, g));
    const auto expected = kronecker_sums(ev_s, ev_t, 1 / (eps * eps), 0.0);
    REQUIRE(weighted.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) CHECK(weighted[i] == doctest::Approx(expected[i]).epsilon(1e-11));

    const double k = 3.0;
    const auto reference = testing::dense_eigenvalues(assemble_reference(z, eps, g, k));
    const auto expected_ref = kronecker_sums(ev_s, ev_t, 1 / (eps * eps), -std::pow(pi / 2 / eps, 2) + k / eps);
    for (std::size_t i = 0; i < expected_ref.size(); ++i)
        CHECK(reference[i] == doctest::Approx(expected_ref[i]).epsilon(1e-10).scale(1.0));

    const GeneralizedPencil flat = assemble_flat(z, eps, {}, g);
    const GeneralizedPencil wt = assemble_weighted(z, eps, {}, g);
    const double scale = wt.A.max_abs();
    for (std::size_t i = 0; i < wt.size(); ++i)
        for (std::size_t j = 0; j < wt.size(); ++j) {
            CHECK(std::abs(flat.A(i, j) - wt.A(i, j)) <= 1e-13 * scale);
            CHECK(std::abs(flat.M(i, j) - wt.M(i, j)) <= 1e-15);
        }
}

TEST_CASE("transverse pencil converges to the quarter-wave eigenvalue") {
    const double exact = pi * pi / 4;
    const double e1 = testing::dense_eigenvalues(assemble_transverse(0.0, 16))[0] - exact;
    const double e2 = testing::dense_eigenvalues(assemble_transverse(0.0, 32))[0] - exact;
    CHECK(e1 > 0);
    CHECK(std::log2(e1 / e2) == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("1D pencil with a constant potential shifts the spectrum") {
    const Interval I = make_interval(0, 1);
    const auto free = testing::dense_eigenvalues(assemble_1d([](double) { return 0.0; }, I, 64));
    const auto shifted = testing::dense_eigenvalues(assemble_1d([](double) { return 5.0; }, I, 64));
    for (std::size_t i = 0; i < 5; ++i) CHECK(shifted[i] == doctest::Approx(free[i] + 5.0).epsilon(1e-12));
    CHECK(free[0] == doctest::Approx(pi * pi).epsilon(1e-3));
}

TEST_CASE("mapped basis makes the flat pencil match the weighted one") {
    const auto g = parse_profile("gaussian_dip:1,0,1", make_interval(-6, 6, true));
    const TensorGrid grid = build_grid(g.interval, 24, 4);
    const double eps = 0.1;
    const auto wt = testing::dense_eigenvalues(assemble_weighted(g, eps, {}, grid));
    AssemblyOptions mapped;
    mapped.mapped_basis = true;
    const auto fl = testing::dense_eigenvalues(assemble_flat(g, eps, {}, grid, std::nullopt, mapped));
    for (std::size_t i = 0; i < 5; ++i) CHECK(fl[i] == doctest::Approx(wt[i]).epsilon(1e-11));
    const auto nodal = testing::dense_eigenvalues(assemble_flat(g, eps, {}, grid));
    CHECK(std::abs(nodal[0] - wt[0]) > 1e-8 * std::abs(wt[0]));
}

TEST_CASE("robin with zero coefficient equals neumann exactly") {
    const auto g = parse_profile("gaussian_dip:1,0,1", make_interval(-6, 6, true));
    const TensorGrid grid = build_grid(g.interval, 16, 4);
    const auto dn = assemble_weighted(g, 0.1, BoundaryConditionSet::dirichlet_neumann(), grid);
    const auto rb = assemble_weighted(g, 0.1, BoundaryConditionSet::dirichlet_robin([](double) { return 0.0; }), grid);
    CHECK(dn.A == rb.A);
    CHECK(dn.M == rb.M);
}

TEST_CASE("robin boundary term adds a boundary mass") {
    const auto z = parse_profile("zero", make_interval(0, 1));
    const TensorGrid grid = build_grid(z.interval, 8, 4);
    const double eps = 0.1, alpha = 0.7;
    const auto dn = assemble_weighted(z, eps, {}, grid);
    const auto rb = assemble_weighted(z, eps, BoundaryConditionSet::dirichlet_robin([=](double) { return alpha; }), grid);
    const DofLayout layout(grid, OuterCondition::Robin);
    const double hs = grid.hs();
    const auto top = static_cast<std::size_t>(layout.index(3, grid.Nt));
    const auto next = static_cast<std::size_t>(layout.index(4, grid.Nt));
    CHECK(rb.A(top, top) - dn.A(top, top) == doctest::Approx(alpha / eps * 2 * hs / 3));
    CHECK(rb.A(top, next) - dn.A(top, next) == doctest::Approx(alpha / eps * hs / 6));
    CHECK(rb.M == dn.M);
}

TEST_CASE("inadmissible width and invalid shifts are rejected") {
    const auto c = parse_profile("constant:20", make_interval(0, 1));
    const TensorGrid grid = build_grid(c.interval, 8, 4);
    CHECK_THROWS_AS(assemble_weighted(c, 0.1, {}, grid), InvalidInput);
    const auto z = parse_profile("zero", make_interval(0, 1));
    CHECK_THROWS_AS(assemble_flat(z, 0.1, BoundaryConditionSet::dirichlet_dirichlet(), grid), InvalidInput);
    AssemblyOptions bad;
    bad.gauss_points = 9;
    CHECK_THROWS_AS(assemble_weighted(z, 0.1, {}, grid, bad), InvalidInput);
}

TEST_CASE("matrix market listing") {
    SymBandMatrix m(3, 1);
    m.add(0, 0, 2.0);
    m.add(1, 0, -1.0);
    m.add(2, 2, 4.0);
    std::ostringstream out;
    write_matrix_market(out, m);
    std::istringstream in(out.str());
    std::string header;
    std::getline(in, header);
    CHECK(header == "%%MatrixMarket matrix coordinate real symmetric");
    int rows = 0, cols = 0, nnz = 0;
    in >> rows >> cols >> nnz;
    CHECK(rows == 3);
    CHECK(cols == 3);
    CHECK(nnz == 3);
}

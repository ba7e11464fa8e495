#pragma once

#include "dnstrip/banded.hpp"
#include "dnstrip/coefficients.hpp"
#include "dnstrip/geometry.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace dnstrip {

/// Uniform tensor grid on I x (0, 1) with Ns longitudinal and Nt transverse cells.
struct TensorGrid {
    Interval interval;
    int Ns = 0;
    int Nt = 0;
    std::vector<double> s_nodes;
    std::vector<double> t_nodes;

    double hs() const { return interval.length() / Ns; }
    double ht() const { return 1.0 / Nt; }
};

/// Retained dofs = (Ns - 1) * Nt for the DN layout (t = 0 row and the two
/// end columns eliminated).
TensorGrid build_grid(Interval interval, int Ns, int Nt);

enum class OuterCondition { Neumann, Robin, Dirichlet };

/// Inner curve (t = 0) and the ends s = a, b are always Dirichlet.
struct BoundaryConditionSet {
    OuterCondition outer = OuterCondition::Neumann;
    ScalarFunction alpha; // Robin coefficient, required iff outer == Robin

    static BoundaryConditionSet dirichlet_neumann() { return {}; }
    static BoundaryConditionSet dirichlet_dirichlet() { return {OuterCondition::Dirichlet, {}}; }
    static BoundaryConditionSet dirichlet_robin(ScalarFunction alpha) { return {OuterCondition::Robin, std::move(alpha)}; }

    BoundaryVariant variant() const;
};

/// Free-node numbering with t running fastest.
struct DofLayout {
    int ns_free = 0; ///< interior s nodes 1 .. Ns-1
    int nt_free = 0; ///< t nodes 1 .. Nt (Neumann/Robin) or 1 .. Nt-1 (Dirichlet)

    DofLayout(const TensorGrid& grid, OuterCondition outer);
    std::size_t size() const { return static_cast<std::size_t>(ns_free) * nt_free; }
    std::size_t half_bandwidth() const { return static_cast<std::size_t>(nt_free) + 1; }
    /// Index of grid node (i, j), or -1 for an eliminated Dirichlet node.
    long index(int i, int j) const;
};

enum class FormKind { Weighted, Flat, Reference, OneDimensional, Transverse };

std::string to_string(FormKind kind);

struct PencilMeta {
    FormKind form = FormKind::Weighted;
    double eps = 0.0;
    OuterCondition outer = OuterCondition::Neumann;
    std::optional<double> shift_k;
    int Ns = 0;
    int Nt = 0;
    bool mapped_basis = false;
    /// Nodal values of a smooth trial function resembling the ground state
    /// (phi(s) chi_1(t) in 2D); its Rayleigh quotient seeds the default shift.
    std::vector<double> trial;
};

/// Galerkin pair (A, M) of a quadratic form on the retained dofs.
struct GeneralizedPencil {
    SymBandMatrix A;
    SymBandMatrix M;
    PencilMeta meta;

    std::size_t size() const { return A.size(); }
    std::size_t half_bandwidth() const { return A.half_bandwidth(); }
};

struct AssemblyOptions {
    int gauss_points = 2; ///< per direction per cell, 1 .. 8
    /// Flat and reference forms only: use sqrt(h) times the bilinear hats,
    /// i.e. the image of the weighted element space under psi -> sqrt(h) psi.
    /// The flat pencil then matches the weighted one up to quadrature error.
    bool mapped_basis = false;
};

/// Curvilinear form in the weighted space L^2(h ds dt):
/// A ~ int |d_s psi|^2 / h + h |d_t psi|^2 / eps^2  [+ eps^-1 int alpha h(s,1) |psi(s,1)|^2 ds],
/// M ~ int h |psi|^2.
GeneralizedPencil assemble_weighted(const CurvatureProfile& profile, double eps, const BoundaryConditionSet& bc,
                                    const TensorGrid& grid, const AssemblyOptions& options = {});

/// The same operator after psi -> sqrt(h) psi, in the flat space L^2(ds dt):
/// A ~ int |d_s psi|^2/h^2 + |d_t psi|^2/eps^2 + (V1 - V3)|psi|^2 + V2 psi d_s psi + int_{t=1} v_b |psi|^2.
/// With shift_k the pencil represents H - (pi/2eps)^2 + k/eps. DN only.
GeneralizedPencil assemble_flat(const CurvatureProfile& profile, double eps, const BoundaryConditionSet& bc,
                                const TensorGrid& grid, std::optional<double> shift_k = std::nullopt,
                                const AssemblyOptions& options = {});

/// Decoupled comparison form
/// int |d_s psi|^2 + eps^-2 (|d_t psi|^2 - (pi/2)^2 |psi|^2) + (k + kappa)/eps |psi|^2, flat mass.
GeneralizedPencil assemble_reference(const CurvatureProfile& profile, double eps, const TensorGrid& grid, double k,
                                     const AssemblyOptions& options = {});

/// int |phi'|^2 + V |phi|^2 with Dirichlet ends on Ns uniform cells.
GeneralizedPencil assemble_1d(const ScalarFunction& potential, Interval interval, int Ns,
                              const AssemblyOptions& options = {});

/// int_0^1 |chi'|^2 (1 - c t) over int_0^1 |chi|^2 (1 - c t), chi(0) = 0, natural at t = 1.
/// Weights are linear in t, so 2-point Gauss is exact.
GeneralizedPencil assemble_transverse(double c, int Nt);

/// Nodal interpolant of f(s, t) on the retained dofs.
std::vector<double> interpolate(const TensorGrid& grid, OuterCondition outer,
                                const std::function<double(double, double)>& f);

/// MatrixMarket "coordinate real symmetric" listing of the lower triangle.
void write_matrix_market(std::ostream& out, const SymBandMatrix& matrix);

} // namespace dnstrip

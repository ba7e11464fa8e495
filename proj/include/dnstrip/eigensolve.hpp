#pragma once

#include "dnstrip/banded.hpp"
#include "dnstrip/discretize.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace dnstrip {

/// In-band LDL^T of a symmetric band matrix (no pivoting), L unit lower.
///
/// The factors are immutable after construction, so `solve` may be called
/// concurrently.
class BandedFactorization {
public:
    /// Throws SingularShift (with the pivot index) when a pivot falls below
    /// pivot_tolerance * max|K|.
    static BandedFactorization factor(const SymBandMatrix& K, double pivot_tolerance = 1e-12);

    /// Overwrites b with K^{-1} b.
    void solve(std::span<double> b) const;

    /// Number of negative pivots = number of eigenvalues of K below zero (Sylvester).
    std::size_t negative_pivots() const { return negative_; }
    std::size_t size() const { return d_.size(); }
    std::size_t half_bandwidth() const { return factors_.half_bandwidth(); }
    double shift() const { return shift_; }

    /// Entry (i, j) of L D L^T, for reconstruction checks.
    double reconstruct(std::size_t i, std::size_t j) const;

private:
    friend BandedFactorization ldlt_banded(const GeneralizedPencil&, double);
    SymBandMatrix factors_; // strictly lower part holds L
    std::vector<double> d_;
    std::size_t negative_ = 0;
    double shift_ = 0.0;
};

/// Factorization of A - sigma M.
BandedFactorization ldlt_banded(const GeneralizedPencil& pencil, double sigma);

/// Number of pencil eigenvalues strictly below tau (inertia of A - tau M).
std::size_t count_below(const GeneralizedPencil& pencil, double tau);

struct Spectrum {
    std::vector<double> eigenvalues; ///< ascending
    /// ||A x - lambda M x||_{M^-1} / (||x||_M max(|lambda|, 1)), recomputed from the returned pairs.
    std::vector<double> residuals;
    std::vector<bool> converged;
    /// Tolerance each residual was held to: the requested tol, raised to the
    /// round-off floor 20 u lambda_max / max(|lambda|, 1) when that is larger.
    std::vector<double> tolerance;
    std::vector<std::vector<double>> eigenvectors; ///< M-normalized; filled when requested
    double sigma = 0.0;
    int operator_applications = 0;
};

struct EigenOptions {
    double tol = 1e-8;
    std::optional<double> sigma;
    int max_applications = 4000;
    int max_basis = 0; ///< 0 picks max(2 m + 20, 40)
    bool keep_vectors = false;
    std::uint64_t seed = 0x5eed5eedULL;
};

/// The m smallest eigenvalues of A x = lambda M x by shift-invert Lanczos in
/// the M inner product with full reorthogonalization and thick restarts.
///
/// The shift is pushed below the spectrum until the inertia of A - sigma M is
/// zero; the default starting guess is the Rayleigh quotient of the pencil's
/// trial vector minus 10%. Missed copies of clustered eigenvalues are caught
/// by an inertia count above the last returned value. Throws NumericalFailure
/// when the residual certificates cannot be met.
Spectrum smallest_eigenpairs(const GeneralizedPencil& pencil, int m, const EigenOptions& options = {});

struct GapOptions {
    double tol = 1e-6;
    int max_applications = 600;
    std::uint64_t seed = 0x9a9a9a9aULL;
};

/// Largest singular value of A_a^{-1} M - A_b^{-1} M in the M inner product.
/// Both pencils must be positive definite and share the mass matrix.
double operator_gap_norm(const GeneralizedPencil& a, const GeneralizedPencil& b, const GapOptions& options = {});

} // namespace dnstrip

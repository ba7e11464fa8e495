#include "dnstrip/eigensolve.hpp"

#include "dnstrip/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

namespace dnstrip {

BandedFactorization BandedFactorization::factor(const SymBandMatrix& K, double pivot_tolerance) {
    BandedFactorization f;
    f.factors_ = K;
    const std::size_t n = K.size(), bw = K.half_bandwidth(), w = bw + 1;
    f.d_.assign(n, 0.0);
    const double threshold = pivot_tolerance * K.max_abs();
    double* data = n ? f.factors_.row(0).data() : nullptr;
    std::vector<double> tmp(w);

    for (std::size_t i = 0; i < n; ++i) {
        double* ri = data + i * w;
        const std::size_t j0 = i >= bw ? i - bw : 0;
        // tmp[k - j0] = L_ik D_k
        for (std::size_t j = j0; j < i; ++j) {
            const double* rj = data + j * w;
            double s = ri[j + bw - i];
            for (std::size_t k = j0; k < j; ++k) s -= tmp[k - j0] * rj[k + bw - j];
            tmp[j - j0] = s;
            ri[j + bw - i] = s / f.d_[j];
        }
        double d = ri[bw];
        for (std::size_t k = j0; k < i; ++k) d -= ri[k + bw - i] * tmp[k - j0];
        if (!(std::abs(d) > threshold)) {
            std::ostringstream msg;
            msg << "LDL^T breakdown: pivot " << i << " = " << d << " (shift singular or numerically indefinite)";
            throw SingularShift(msg.str(), i);
        }
        f.d_[i] = d;
        ri[bw] = 1.0;
        if (d < 0.0) ++f.negative_;
    }
    return f;
}

void BandedFactorization::solve(std::span<double> b) const {
    const std::size_t n = d_.size(), bw = factors_.half_bandwidth(), w = bw + 1;
    const double* data = factors_.raw().data();
    for (std::size_t i = 0; i < n; ++i) {
        const double* ri = data + i * w;
        const std::size_t j0 = i >= bw ? i - bw : 0;
        double s = b[i];
        for (std::size_t k = j0; k < i; ++k) s -= ri[k + bw - i] * b[k];
        b[i] = s;
    }
    for (std::size_t i = 0; i < n; ++i) b[i] /= d_[i];
    for (std::size_t i = n; i-- > 0;) {
        const double* ri = data + i * w;
        const std::size_t j0 = i >= bw ? i - bw : 0;
        const double xi = b[i];
        for (std::size_t k = j0; k < i; ++k) b[k] -= ri[k + bw - i] * xi;
    }
}

double BandedFactorization::reconstruct(std::size_t i, std::size_t j) const {
    if (i < j) std::swap(i, j);
    const std::size_t bw = factors_.half_bandwidth();
    if (i - j > bw) return 0.0;
    auto L = [&](std::size_t r, std::size_t c) { return r == c ? 1.0 : factors_(r, c); };
    const std::size_t k0 = i >= bw ? i - bw : 0;
    double s = 0.0;
    for (std::size_t k = k0; k <= j; ++k) s += L(i, k) * d_[k] * L(j, k);
    return s;
}

BandedFactorization ldlt_banded(const GeneralizedPencil& pencil, double sigma) {
    BandedFactorization f = BandedFactorization::factor(sigma == 0.0 ? pencil.A : pencil.A.plus_scaled(pencil.M, -sigma));
    f.shift_ = sigma;
    return f;
}

std::size_t count_below(const GeneralizedPencil& pencil, double tau) {
    // Only pivot signs matter here, so just exact zeros count as breakdown.
    return BandedFactorization::factor(pencil.A.plus_scaled(pencil.M, -tau), 0.0).negative_pivots();
}

namespace {

using Vec = std::vector<double>;
using Operator = std::function<void(std::span<const double>, std::span<double>)>;

enum class Want { LargestAlgebraic, LargestMagnitude };

struct KrylovPairs {
    std::vector<double> theta;
    std::vector<Vec> vectors;
    int applications = 0;
    bool converged = false;
};

double m_norm(const SymBandMatrix& M, const Vec& x, Vec& scratch) {
    M.multiply(x, scratch);
    return std::sqrt(std::max(0.0, dot(x, scratch)));
}

// x -= sum_i <v_i, x>_M v_i, twice; returns the accumulated coefficients.
std::vector<double> m_orthogonalize(const SymBandMatrix& M, const std::vector<Vec>& basis, std::size_t count, Vec& x,
                                    Vec& scratch) {
    std::vector<double> coeff(count, 0.0);
    for (int pass = 0; pass < 2; ++pass) {
        M.multiply(x, scratch);
        std::vector<double> c(count);
        for (std::size_t i = 0; i < count; ++i) c[i] = dot(basis[i], scratch);
        for (std::size_t i = 0; i < count; ++i) {
            const double ci = c[i];
            if (ci == 0.0) continue;
            const Vec& v = basis[i];
            for (std::size_t r = 0; r < x.size(); ++r) x[r] -= ci * v[r];
            coeff[i] += ci;
        }
    }
    return coeff;
}

void deflate(const SymBandMatrix& M, const std::vector<Vec>& locked, Vec& x, Vec& scratch) {
    if (!locked.empty()) m_orthogonalize(M, locked, locked.size(), x, scratch);
}

// Thick-restart Lanczos (implemented as Arnoldi with full reorthogonalization)
// for an operator self-adjoint in the M inner product.
KrylovPairs symmetric_krylov(const Operator& op, const SymBandMatrix& M, int nev, Want want, double tol,
                             int max_applications, int max_basis, Vec start, const std::vector<Vec>& locked,
                             std::mt19937_64& rng) {
    const std::size_t n = M.size();
    const std::size_t avail = n - std::min(n, locked.size());
    if (avail == 0) return {};
    nev = static_cast<int>(std::min<std::size_t>(nev, avail));
    const std::size_t basis_cap = std::min<std::size_t>(avail, std::max<std::size_t>(max_basis, nev + 2));

    Vec scratch(n), w(n);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    auto random_vector = [&] {
        Vec r(n);
        for (double& x : r) x = uni(rng);
        return r;
    };

    std::vector<Vec> V;
    V.reserve(basis_cap + 1);
    {
        if (start.size() != n) start = random_vector();
        deflate(M, locked, start, scratch);
        double nrm = m_norm(M, start, scratch);
        if (!(nrm > 0.0)) {
            start = random_vector();
            deflate(M, locked, start, scratch);
            nrm = m_norm(M, start, scratch);
        }
        for (double& x : start) x /= nrm;
        V.push_back(std::move(start));
    }

    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(basis_cap + 1, basis_cap + 1);
    KrylovPairs out;
    std::size_t k = 0;
    while (true) {
        op(V[k], w);
        ++out.applications;
        deflate(M, locked, w, scratch);
        const std::vector<double> h = m_orthogonalize(M, V, k + 1, w, scratch);
        for (std::size_t i = 0; i <= k; ++i) {
            T(i, k) = h[i];
            T(k, i) = h[i];
        }
        const double beta = m_norm(M, w, scratch);

        const Eigen::Index dim = static_cast<Eigen::Index>(k + 1);
        const Eigen::MatrixXd Tk = 0.5 * (T.topLeftCorner(dim, dim) + T.topLeftCorner(dim, dim).transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Tk);
        const Eigen::VectorXd& theta = es.eigenvalues();
        const Eigen::MatrixXd& Y = es.eigenvectors();

        std::vector<Eigen::Index> order(dim);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
            return want == Want::LargestAlgebraic ? theta(a) > theta(b) : std::abs(theta(a)) > std::abs(theta(b));
        });

        const int wanted = std::min<int>(nev, static_cast<int>(dim));
        bool done = wanted == nev;
        const double scale = std::abs(theta(order[0]));
        for (int i = 0; i < wanted && done; ++i) {
            const double est = std::abs(beta * Y(dim - 1, order[i]));
            if (est > tol * std::max(std::abs(theta(order[i])), 1e-3 * scale)) done = false;
        }
        const bool exhausted = k + 1 == avail;
        if (done || exhausted || out.applications >= max_applications) {
            out.converged = done || exhausted;
            for (int i = 0; i < wanted; ++i) {
                Vec x(n, 0.0);
                for (Eigen::Index c = 0; c < dim; ++c) {
                    const double y = Y(c, order[i]);
                    for (std::size_t r = 0; r < n; ++r) x[r] += y * V[c][r];
                }
                out.theta.push_back(theta(order[i]));
                out.vectors.push_back(std::move(x));
            }
            return out;
        }

        Vec next;
        if (beta > 1e-13 * std::max(scale, 1e-300)) {
            next = w;
            for (double& x : next) x /= beta;
        } else {
            // Invariant subspace: continue from a fresh direction.
            next = random_vector();
            deflate(M, locked, next, scratch);
            m_orthogonalize(M, V, k + 1, next, scratch);
            const double nrm = m_norm(M, next, scratch);
            for (double& x : next) x /= nrm;
        }

        if (k + 1 == basis_cap) {
            const std::size_t keep = std::min<std::size_t>(dim - 1, std::max<std::size_t>(wanted + 1, basis_cap / 2));
            std::vector<Vec> kept(keep, Vec(n, 0.0));
            for (std::size_t i = 0; i < keep; ++i)
                for (Eigen::Index c = 0; c < dim; ++c) {
                    const double y = Y(c, order[i]);
                    if (y == 0.0) continue;
                    for (std::size_t r = 0; r < n; ++r) kept[i][r] += y * V[c][r];
                }
            T.setZero();
            for (std::size_t i = 0; i < keep; ++i) T(i, i) = theta(order[i]);
            V = std::move(kept);
            V.push_back(std::move(next));
            k = keep;
        } else {
            V.push_back(std::move(next));
            ++k;
        }
    }
}

void normalize_sign(Vec& x) {
    double big = 0.0;
    for (double v : x) big = std::max(big, std::abs(v));
    for (double v : x) {
        if (std::abs(v) > 1e-8 * big) {
            if (v < 0.0)
                for (double& u : x) u = -u;
            return;
        }
    }
}

double rayleigh_quotient(const GeneralizedPencil& p, const Vec& x) {
    Vec y(x.size());
    p.A.multiply(x, y);
    const double num = dot(x, y);
    p.M.multiply(x, y);
    return num / dot(x, y);
}

// Moves sigma down until A - sigma M is positive definite.
BandedFactorization factor_below_spectrum(const GeneralizedPencil& p, double sigma, double& used) {
    double step = std::max(0.5 * std::abs(sigma), 1.0);
    bool perturbed = false;
    for (int attempt = 0; attempt < 200; ++attempt) {
        try {
            BandedFactorization f = ldlt_banded(p, sigma);
            if (f.negative_pivots() == 0) {
                used = sigma;
                return f;
            }
            sigma -= step;
            step *= 2.0;
        } catch (const SingularShift&) {
            if (perturbed) throw;
            perturbed = true;
            sigma -= 1e-6 * std::max(std::abs(sigma), 1.0);
        }
    }
    throw NumericalFailure("could not place the shift below the spectrum");
}

// Certificate ||A x - lambda M x||_{M^-1} / max(|lambda|, 1) for M-normalized x.
double residual_certificate(const GeneralizedPencil& p, const BandedFactorization& mass, const Vec& x, double lam) {
    const std::size_t n = x.size();
    Vec r(n), mx(n);
    p.A.multiply(x, r);
    p.M.multiply(x, mx);
    for (std::size_t q = 0; q < n; ++q) r[q] -= lam * mx[q];
    Vec z = r;
    mass.solve(z);
    return std::sqrt(std::max(0.0, dot(r, z))) / std::max(std::abs(lam), 1.0);
}

// One Rayleigh-Ritz step on span{X, K^-1 (A X - M X Lambda)} with K = A - sigma M.
int refine_pairs(const GeneralizedPencil& p, const BandedFactorization& shifted, std::vector<double>& values, std::vector<Vec>& X) {
    const std::size_t n = p.size(), m = X.size();
    std::vector<Vec> basis;
    Vec scratch(n);
    auto push = [&](Vec v) {
        const double before = m_norm(p.M, v, scratch);
        if (!(before > 0.0)) return;
        m_orthogonalize(p.M, basis, basis.size(), v, scratch);
        const double after = m_norm(p.M, v, scratch);
        if (!(after > 1e-12 * before)) return;
        for (double& x : v) x /= after;
        basis.push_back(std::move(v));
    };
    for (const Vec& x : X) push(x);
    for (std::size_t i = 0; i < m; ++i) {
        Vec r(n), mx(n);
        p.A.multiply(X[i], r);
        p.M.multiply(X[i], mx);
        for (std::size_t q = 0; q < n; ++q) r[q] -= values[i] * mx[q];
        shifted.solve(r);
        push(std::move(r));
    }
    const Eigen::Index k = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXd H(k, k);
    for (Eigen::Index c = 0; c < k; ++c) {
        p.A.multiply(basis[c], scratch);
        for (Eigen::Index r = 0; r <= c; ++r) H(r, c) = H(c, r) = dot(basis[r], scratch);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    for (std::size_t i = 0; i < m && static_cast<Eigen::Index>(i) < k; ++i) {
        Vec x(n, 0.0);
        for (Eigen::Index c = 0; c < k; ++c) {
            const double y = es.eigenvectors()(c, static_cast<Eigen::Index>(i));
            for (std::size_t q = 0; q < n; ++q) x[q] += y * basis[c][q];
        }
        values[i] = es.eigenvalues()(static_cast<Eigen::Index>(i));
        X[i] = std::move(x);
    }
    return static_cast<int>(m);
}

// Power iteration on M^-1 A; a rough upper-spectrum scale is enough here.
double largest_eigenvalue_estimate(const GeneralizedPencil& p, const BandedFactorization& mass,
                                   std::mt19937_64& rng) {
    const std::size_t n = p.size();
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    Vec x(n), y(n), scratch(n);
    for (double& v : x) v = uni(rng);
    double est = 0.0;
    for (int it = 0; it < 12; ++it) {
        const double nrm = m_norm(p.M, x, scratch);
        for (double& v : x) v /= nrm;
        p.A.multiply(x, y);
        est = std::abs(dot(x, y));
        mass.solve(y);
        x.swap(y);
    }
    return est;
}

} // namespace

Spectrum smallest_eigenpairs(const GeneralizedPencil& pencil, int m, const EigenOptions& options) {
    const std::size_t n = pencil.size();
    if (m < 1) throw InvalidInput("smallest_eigenpairs needs m >= 1");
    if (static_cast<std::size_t>(m) > n) throw InvalidInput("m exceeds the pencil dimension");
    if (!(options.tol > 0.0)) throw InvalidInput("tolerance must be positive");

    BandedFactorization mass = [&] {
        try {
            BandedFactorization f = BandedFactorization::factor(pencil.M);
            if (f.negative_pivots() != 0) throw NumericalFailure("mass matrix is not positive definite");
            return f;
        } catch (const SingularShift&) {
            throw NumericalFailure("mass matrix is not positive definite");
        }
    }();

    double sigma0 = 0.0;
    if (options.sigma) {
        sigma0 = *options.sigma;
    } else if (pencil.meta.trial.size() == n) {
        const double rq = rayleigh_quotient(pencil, pencil.meta.trial);
        sigma0 = rq - 0.1 * std::abs(rq);
    } else {
        sigma0 = -1.0;
    }
    double sigma = sigma0;
    const BandedFactorization shifted = factor_below_spectrum(pencil, sigma0, sigma);

    const Operator op = [&](std::span<const double> x, std::span<double> y) {
        pencil.M.multiply(x, y);
        shifted.solve(y);
    };

    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    const int max_basis = options.max_basis > 0 ? options.max_basis : std::max(2 * m + 20, 40);
    const double inner_tol = options.tol * 1e-2;

    std::vector<double> values;
    std::vector<Vec> vectors;
    int applications = 0;

    int need = m;
    for (int round = 0; round < 4 && need > 0; ++round) {
        Vec start(n);
        const Vec& trial = pencil.meta.trial;
        const double tn = trial.size() == n ? std::sqrt(dot(trial, trial) / double(n)) : 0.0;
        for (std::size_t i = 0; i < n; ++i) start[i] = uni(rng) + (tn > 0 ? trial[i] / tn : 0.0);
        KrylovPairs kp = symmetric_krylov(op, pencil.M, need, Want::LargestAlgebraic, inner_tol,
                                          options.max_applications - applications, max_basis, std::move(start),
                                          vectors, rng);
        applications += kp.applications;
        for (std::size_t i = 0; i < kp.theta.size(); ++i) {
            if (!(kp.theta[i] > 0.0)) continue;
            values.push_back(sigma + 1.0 / kp.theta[i]);
            vectors.push_back(std::move(kp.vectors[i]));
        }
        if (!kp.converged) break;

        std::vector<std::size_t> idx(values.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        std::vector<double> v2;
        std::vector<Vec> x2;
        for (std::size_t i = 0; i < std::min<std::size_t>(idx.size(), m); ++i) {
            v2.push_back(values[idx[i]]);
            x2.push_back(std::move(vectors[idx[i]]));
        }
        values = std::move(v2);
        vectors = std::move(x2);
        if (static_cast<int>(values.size()) < m) {
            need = m - static_cast<int>(values.size());
            continue;
        }

        // No eigenvalue may hide below the largest reported one; if some do,
        // search again in the M-complement of the pairs found so far.
        const double top = values.back();
        const double slack = std::max(100.0 * options.tol, 1e-8) * std::max(std::abs(top), 1.0);
        std::size_t below = 0;
        try {
            below = count_below(pencil, top + slack);
        } catch (const SingularShift&) {
            below = count_below(pencil, top + 1.1 * slack);
        }
        need = below > static_cast<std::size_t>(m) ? static_cast<int>(below) - m : 0;
    }

    Vec z(n);
    for (Vec& x : vectors) {
        const double nrm = m_norm(pencil.M, x, z);
        for (double& v : x) v /= nrm;
    }
    auto certify = [&] {
        std::vector<double> res(values.size());
        for (std::size_t i = 0; i < values.size(); ++i) {
            values[i] = rayleigh_quotient(pencil, vectors[i]);
            res[i] = residual_certificate(pencil, mass, vectors[i], values[i]);
        }
        return res;
    };
    std::vector<double> res = certify();
    // A double-precision vector carries a residual of about u * lambda_max;
    // below that level the certificate cannot go.
    const double lambda_max = largest_eigenvalue_estimate(pencil, mass, rng);
    std::vector<double> target(values.size());
    auto update_targets = [&] {
        for (std::size_t i = 0; i < values.size(); ++i)
            target[i] = std::max(options.tol, 20.0 * std::numeric_limits<double>::epsilon() * lambda_max /
                                                  std::max(std::abs(values[i]), 1.0));
    };
    update_targets();
    auto all_met = [&] {
        for (std::size_t i = 0; i < res.size(); ++i)
            if (!(res[i] <= target[i])) return false;
        return true;
    };
    // Ritz estimates from the inverted operator understate the residual by
    // up to ||A - sigma M||; polish until the true certificate holds.
    for (int pass = 0; pass < 6 && !values.empty(); ++pass) {
        if (all_met()) break;
        if (applications >= options.max_applications) break;
        applications += refine_pairs(pencil, shifted, values, vectors);
        res = certify();
        update_targets();
    }

    Spectrum spec;
    spec.sigma = sigma;
    spec.operator_applications = applications;
    for (std::size_t i = 0; i < values.size(); ++i) {
        normalize_sign(vectors[i]);
        spec.eigenvalues.push_back(values[i]);
        spec.residuals.push_back(res[i]);
        spec.converged.push_back(res[i] <= target[i]);
        spec.tolerance.push_back(target[i]);
    }
    // Ties are ordered by the Rayleigh quotient recomputed above.
    std::vector<std::size_t> idx(spec.eigenvalues.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return spec.eigenvalues[a] < spec.eigenvalues[b]; });
    Spectrum sorted = spec;
    for (std::size_t i = 0; i < idx.size(); ++i) {
        sorted.eigenvalues[i] = spec.eigenvalues[idx[i]];
        sorted.residuals[i] = spec.residuals[idx[i]];
        sorted.converged[i] = spec.converged[idx[i]];
        sorted.tolerance[i] = spec.tolerance[idx[i]];
    }
    if (options.keep_vectors) {
        for (std::size_t i = 0; i < idx.size(); ++i) sorted.eigenvectors.push_back(std::move(vectors[idx[i]]));
    }

    const bool ok = static_cast<int>(sorted.eigenvalues.size()) == m &&
                    std::all_of(sorted.converged.begin(), sorted.converged.end(), [](bool c) { return c; });
    if (!ok) {
        std::ostringstream msg;
        msg << "shift-invert Lanczos did not converge: " << sorted.eigenvalues.size() << " of " << m
            << " pairs, residuals";
        for (double res : sorted.residuals) msg << ' ' << res;
        throw NumericalFailure(msg.str());
    }
    return sorted;
}

double operator_gap_norm(const GeneralizedPencil& a, const GeneralizedPencil& b, const GapOptions& options) {
    if (a.size() != b.size() || !(a.M == b.M)) throw InvalidInput("gap norm needs a shared mass matrix and dof layout");
    auto factor_pd = [](const GeneralizedPencil& p) {
        try {
            BandedFactorization f = ldlt_banded(p, 0.0);
            if (f.negative_pivots() == 0) return f;
        } catch (const SingularShift&) {
        }
        throw NumericalFailure("pencil is not positive definite (eps too large for the shift k?)");
    };
    const BandedFactorization fa = factor_pd(a);
    const BandedFactorization fb = factor_pd(b);
    const std::size_t n = a.size();
    Vec tmp(n);
    const Operator op = [&](std::span<const double> x, std::span<double> y) {
        a.M.multiply(x, y);
        tmp.assign(y.begin(), y.end());
        fa.solve(y);
        fb.solve(tmp);
        for (std::size_t i = 0; i < n; ++i) y[i] -= tmp[i];
    };
    std::mt19937_64 rng(options.seed);
    KrylovPairs kp = symmetric_krylov(op, a.M, 1, Want::LargestMagnitude, options.tol, options.max_applications,
                                      60, {}, {}, rng);
    if (!kp.converged) throw NumericalFailure("gap-norm Lanczos did not converge");
    return kp.theta.empty() ? 0.0 : std::abs(kp.theta.front());
}

} // namespace dnstrip

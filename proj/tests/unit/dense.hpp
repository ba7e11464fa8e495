#pragma once

#include "dnstrip/banded.hpp"
#include "dnstrip/discretize.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <vector>

namespace testing {

inline Eigen::MatrixXd dense(const dnstrip::SymBandMatrix& m) {
    const auto n = static_cast<Eigen::Index>(m.size());
    Eigen::MatrixXd d(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) d(i, j) = m(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    return d;
}

/// All eigenvalues of A x = lambda M x, ascending, by a dense solver.
inline std::vector<double> dense_eigenvalues(const dnstrip::GeneralizedPencil& p) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(dense(p.A), dense(p.M), Eigen::EigenvaluesOnly);
    std::vector<double> v(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    std::sort(v.begin(), v.end());
    return v;
}

} // namespace testing

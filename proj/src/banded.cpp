#include "dnstrip/banded.hpp"

#include "dnstrip/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dnstrip {

SymBandMatrix::SymBandMatrix(std::size_t n, std::size_t half_bandwidth)
    : n_(n), bw_(std::min(half_bandwidth, n == 0 ? 0 : n - 1)), data_(n * (bw_ + 1), 0.0) {}

double SymBandMatrix::operator()(std::size_t i, std::size_t j) const {
    if (i < j) std::swap(i, j);
    if (i - j > bw_) return 0.0;
    return data_[i * (bw_ + 1) + (j + bw_ - i)];
}

void SymBandMatrix::add(std::size_t i, std::size_t j, double v) {
    if (i < j) std::swap(i, j);
    if (i >= n_ || i - j > bw_) throw InvalidInput("band matrix entry outside the band");
    data_[i * (bw_ + 1) + (j + bw_ - i)] += v;
}

void SymBandMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    std::fill(y.begin(), y.end(), 0.0);
    const std::size_t w = bw_ + 1;
    for (std::size_t i = 0; i < n_; ++i) {
        const double* r = data_.data() + i * w;
        const std::size_t j0 = i >= bw_ ? i - bw_ : 0;
        double acc = r[bw_] * x[i];
        const double xi = x[i];
        for (std::size_t j = j0; j < i; ++j) {
            const double a = r[j + bw_ - i];
            acc += a * x[j];
            y[j] += a * xi;
        }
        y[i] += acc;
    }
}

double SymBandMatrix::max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

SymBandMatrix SymBandMatrix::plus_scaled(const SymBandMatrix& other, double alpha) const {
    if (other.n_ != n_ || other.bw_ != bw_) throw InvalidInput("band matrices differ in shape");
    SymBandMatrix out = *this;
    for (std::size_t k = 0; k < data_.size(); ++k) out.data_[k] += alpha * other.data_[k];
    return out;
}

double dot(std::span<const double> x, std::span<const double> y) {
    return std::inner_product(x.begin(), x.end(), y.begin(), 0.0);
}

} // namespace dnstrip

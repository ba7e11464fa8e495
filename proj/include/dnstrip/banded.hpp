#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dnstrip {

/// Symmetric band matrix holding the lower band row by row.
///
/// Row i stores columns i - bw .. i at data[i * (bw + 1) + (j - i + bw)];
/// slots with j < 0 stay zero.
class SymBandMatrix {
public:
    SymBandMatrix() = default;
    SymBandMatrix(std::size_t n, std::size_t half_bandwidth);

    std::size_t size() const { return n_; }
    std::size_t half_bandwidth() const { return bw_; }

    /// Entry (i, j) in either triangle; zero outside the band.
    double operator()(std::size_t i, std::size_t j) const;
    /// Adds v to (i, j) and implicitly (j, i). Requires |i - j| <= bw.
    void add(std::size_t i, std::size_t j, double v);

    /// y = A x
    void multiply(std::span<const double> x, std::span<double> y) const;
    double max_abs() const;

    /// this + alpha * other (same shape).
    SymBandMatrix plus_scaled(const SymBandMatrix& other, double alpha) const;

    std::span<const double> row(std::size_t i) const { return {data_.data() + i * (bw_ + 1), bw_ + 1}; }
    std::span<double> row(std::size_t i) { return {data_.data() + i * (bw_ + 1), bw_ + 1}; }
    const std::vector<double>& raw() const { return data_; }

    bool operator==(const SymBandMatrix&) const = default;

private:
    std::size_t n_ = 0;
    std::size_t bw_ = 0;
    std::vector<double> data_;
};

double dot(std::span<const double> x, std::span<const double> y);

} // namespace dnstrip

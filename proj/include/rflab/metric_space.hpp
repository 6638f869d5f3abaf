#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rflab {

/// Symmetric distance matrix with a distinguished base point.
class FiniteMetricSpace {
public:
    FiniteMetricSpace() = default;
    /// Row-major n x n distances; validates the metric axioms (triangle
    /// inequality within `slack`).
    FiniteMetricSpace(std::size_t n, std::vector<double> dist, std::size_t base = 0,
                      double slack = 1e-12);

    std::size_t size() const { return n_; }
    std::size_t base() const { return base_; }
    double operator()(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }
    std::span<const double> row(std::size_t i) const { return {d_.data() + i * n_, n_}; }
    std::span<const double> data() const { return d_; }
    double diameter() const;

    FiniteMetricSpace scaled(double s) const;
    FiniteMetricSpace with_base(std::size_t base) const;

    /// Largest violation of d(i,k) <= d(i,j) + d(j,k); <= 0 for a metric.
    double triangle_excess() const;

private:
    std::size_t n_ = 0;
    std::vector<double> d_;
    std::size_t base_ = 0;
};

/// Builds a space from any callable distance d(i, j).
template <class Dist>
FiniteMetricSpace make_space(std::size_t n, Dist&& d, std::size_t base = 0) {
    std::vector<double> m(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) m[i * n + j] = m[j * n + i] = d(i, j);
    return FiniteMetricSpace(n, std::move(m), base);
}

}  // namespace rflab

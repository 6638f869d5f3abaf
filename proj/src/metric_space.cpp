#include "rflab/metric_space.hpp"

#include <algorithm>
#include <cmath>

#include "rflab/error.hpp"

namespace rflab {

FiniteMetricSpace::FiniteMetricSpace(std::size_t n, std::vector<double> dist, std::size_t base,
                                     double slack)
    : n_(n), d_(std::move(dist)), base_(base) {
    require(n_ >= 1, ErrorCode::InvalidArgument, "metric space needs at least one point");
    require(d_.size() == n_ * n_, ErrorCode::InvalidArgument, "distance matrix must be n x n");
    require(base_ < n_, ErrorCode::InvalidArgument, "base index out of range");
    for (std::size_t i = 0; i < n_; ++i) {
        require(d_[i * n_ + i] == 0.0, ErrorCode::InvalidArgument, "nonzero diagonal");
        for (std::size_t j = 0; j < n_; ++j) {
            const double x = d_[i * n_ + j];
            require(std::isfinite(x) && x >= 0.0, ErrorCode::InvalidArgument,
                    "distances must be finite and nonnegative");
            require(x == d_[j * n_ + i], ErrorCode::InvalidArgument, "distance matrix not symmetric");
        }
    }
    const double tol = slack * std::max(1.0, diameter());
    require(triangle_excess() <= tol, ErrorCode::InvalidArgument, "triangle inequality violated");
}

double FiniteMetricSpace::diameter() const {
    return d_.empty() ? 0.0 : *std::max_element(d_.begin(), d_.end());
}

double FiniteMetricSpace::triangle_excess() const {
    double worst = -std::numeric_limits<double>::infinity();
    if (n_ < 3) return 0.0;
    for (std::size_t j = 0; j < n_; ++j)
        for (std::size_t i = 0; i < n_; ++i) {
            const double dij = d_[i * n_ + j];
            const double* rj = d_.data() + j * n_;
            const double* ri = d_.data() + i * n_;
            for (std::size_t k = 0; k < n_; ++k) worst = std::max(worst, ri[k] - dij - rj[k]);
        }
    return worst;
}

FiniteMetricSpace FiniteMetricSpace::scaled(double s) const {
    require(s > 0.0, ErrorCode::InvalidArgument, "scale must be positive");
    auto d = d_;
    for (double& x : d) x *= s;
    return FiniteMetricSpace(n_, std::move(d), base_);
}

FiniteMetricSpace FiniteMetricSpace::with_base(std::size_t base) const {
    FiniteMetricSpace out = *this;
    require(base < n_, ErrorCode::InvalidArgument, "base index out of range");
    out.base_ = base;
    return out;
}

}  // namespace rflab

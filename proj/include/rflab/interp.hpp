#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>

namespace rflab {

/// Four-point Lagrange cubic on a uniform grid x_j = x0 + j*h. The stencil is
/// shifted inward near the ends; queries outside [x0, x_last] extrapolate.
inline double cubic_uniform(double x0, double h, std::span<const double> y, double x) {
    const std::size_t n = y.size();
    if (n == 1) return y[0];
    if (n < 4) {
        double u = (x - x0) / h;
        auto j = static_cast<std::ptrdiff_t>(std::floor(u));
        j = std::clamp<std::ptrdiff_t>(j, 0, static_cast<std::ptrdiff_t>(n) - 2);
        double w = u - static_cast<double>(j);
        return (1.0 - w) * y[j] + w * y[j + 1];
    }
    double u = (x - x0) / h;
    auto j = static_cast<std::ptrdiff_t>(std::floor(u)) - 1;
    j = std::clamp<std::ptrdiff_t>(j, 0, static_cast<std::ptrdiff_t>(n) - 4);
    double t = u - static_cast<double>(j);
    // nodes at t = 0, 1, 2, 3
    double l0 = -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0;
    double l1 = t * (t - 2.0) * (t - 3.0) / 2.0;
    double l2 = -t * (t - 1.0) * (t - 3.0) / 2.0;
    double l3 = t * (t - 1.0) * (t - 2.0) / 6.0;
    return l0 * y[j] + l1 * y[j + 1] + l2 * y[j + 2] + l3 * y[j + 3];
}

/// Cubic Hermite on [t0, t1] from values and time derivatives at both ends.
inline double hermite(double t0, double t1, double y0, double y1, double d0, double d1,
                      double t) {
    const double dt = t1 - t0;
    const double s = (t - t0) / dt;
    const double s2 = s * s, s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1;
    const double h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2;
    const double h11 = s3 - s2;
    return h00 * y0 + h10 * dt * d0 + h01 * y1 + h11 * dt * d1;
}

/// Interval index i with t[i] <= x <= t[i+1] for sorted t (clamped).
inline std::size_t bracket(std::span<const double> t, double x) {
    auto it = std::upper_bound(t.begin(), t.end(), x);
    std::size_t i = it == t.begin() ? 0 : static_cast<std::size_t>(it - t.begin()) - 1;
    return std::min(i, t.size() - 2);
}

}  // namespace rflab

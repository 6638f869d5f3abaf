#include "rflab/curvature.hpp"

#include <cmath>

#include "rflab/error.hpp"
#include "rflab/parallel.hpp"

namespace rflab {

namespace {

void check_view(const ProfileView& p, std::span<double> out) {
    const std::size_t n = p.f.size();
    require(n >= 5, ErrorCode::GridTooSmall, "gauss_curvature needs at least 5 points");
    require(p.phi.size() == n && out.size() == n, ErrorCode::InvalidArgument, "size mismatch");
    for (std::size_t j = 0; j < n; ++j)
        require(p.phi[j] > 0.0, ErrorCode::DegenerateMetric, "phi <= 0");
    for (std::size_t j = 1; j + 1 < n; ++j)
        require(p.f[j] > 0.0, ErrorCode::DegenerateMetric, "interior f <= 0");
    if (!p.closed_tip) require(p.f[0] > 0.0, ErrorCode::DegenerateMetric, "f[0] <= 0 on open end");
    if (!p.closed_end)
        require(p.f[n - 1] > 0.0, ErrorCode::DegenerateMetric, "f[n-1] <= 0 on open end");
}

inline double interior_point(const ProfileView& p, std::size_t j) {
    const auto& f = p.f;
    const auto& phi = p.phi;
    const double h = p.h;
    const double pl = 0.5 * (phi[j - 1] + phi[j]);
    const double pr = 0.5 * (phi[j] + phi[j + 1]);
    const double ql = (f[j] - f[j - 1]) / (h * pl);
    const double qr = (f[j + 1] - f[j]) / (h * pr);
    return -(qr - ql) / (h * f[j] * phi[j]);
}

// One-sided second-order evaluation; dir = +1 at the left end, -1 at the right end.
inline double open_end(const ProfileView& p, std::size_t j, int dir) {
    const auto& f = p.f;
    const auto& phi = p.phi;
    const double h = p.h;
    auto at = [&](std::span<const double> v, int k) {
        return v[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(j) + dir * k)];
    };
    const double d = static_cast<double>(dir);
    const double f1 = d * (-3.0 * at(f, 0) + 4.0 * at(f, 1) - at(f, 2)) / (2.0 * h);
    const double f2 = (2.0 * at(f, 0) - 5.0 * at(f, 1) + 4.0 * at(f, 2) - at(f, 3)) / (h * h);
    const double p1 = d * (-3.0 * at(phi, 0) + 4.0 * at(phi, 1) - at(phi, 2)) / (2.0 * h);
    const double ph = phi[j];
    return -(f2 / ph - f1 * p1 / (ph * ph)) / (f[j] * ph);
}

void finish_ends(const ProfileView& p, std::span<double> out) {
    const std::size_t n = out.size();
    // K is even about a smooth fixed point: K(h) = a + b h^2, K(2h) = a + 4 b h^2
    out[0] = p.closed_tip ? (4.0 * out[1] - out[2]) / 3.0 : open_end(p, 0, +1);
    out[n - 1] = p.closed_end ? (4.0 * out[n - 2] - out[n - 3]) / 3.0 : open_end(p, n - 1, -1);
}

}  // namespace

void gauss_curvature_into(const ProfileView& p, std::span<double> out) {
    check_view(p, out);
    const auto n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static) if (n >= kParallelGridThreshold)
    for (std::ptrdiff_t j = 1; j < n - 1; ++j)
        out[static_cast<std::size_t>(j)] = interior_point(p, static_cast<std::size_t>(j));
    finish_ends(p, out);
}

void gauss_curvature_serial_into(const ProfileView& p, std::span<double> out) {
    check_view(p, out);
    for (std::size_t j = 1; j + 1 < out.size(); ++j) out[j] = interior_point(p, j);
    finish_ends(p, out);
}

std::vector<double> gauss_curvature(const RadialProfile& p) {
    std::vector<double> k(p.size());
    gauss_curvature_into(view(p), k);
    return k;
}

std::vector<double> gauss_curvature_serial(const RadialProfile& p) {
    std::vector<double> k(p.size());
    gauss_curvature_serial_into(view(p), k);
    return k;
}

CurvatureSpectrum spectrum_of_surface_product(const RadialProfile& base) {
    auto k = gauss_curvature(base);
    std::vector<double> zero(k.size(), 0.0);
    for (double& x : k) x *= 2.0;
    return CurvatureSpectrum(zero, zero, std::move(k));
}

CurvatureSpectrum spectrum_product(const Warped3Metric& m) {
    require(!m.twisted(), ErrorCode::InvalidArgument,
            "spectrum_product requires an untwisted product metric");
    return spectrum_of_surface_product(m.base);
}

RadialProfile quotient_metric(const RadialProfile& p, double a, double b) {
    require(b != 0.0, ErrorCode::ZeroB, "quotient by an action with b = 0 degenerates");
    const double c = (a / b) * (a / b);
    auto f = p.f();
    std::vector<double> F(f.size());
    for (std::size_t j = 0; j < f.size(); ++j) F[j] = f[j] / std::sqrt(1.0 + c * f[j] * f[j]);
    auto phi = p.phi();
    return p.with_values(std::vector<double>(phi.begin(), phi.end()), std::move(F), p.time_stamp());
}

std::vector<double> scalar_from_spectrum(const CurvatureSpectrum& s) {
    auto r = s.scalar();
    return {r.begin(), r.end()};
}

}  // namespace rflab

#pragma once

#include <span>
#include <vector>

#include "rflab/profile.hpp"

namespace rflab {

/// Raw coefficient data for the curvature kernels; flow stages evaluate curvature
/// on intermediate states that are never materialized as RadialProfiles.
struct ProfileView {
    double h;
    std::span<const double> phi;
    std::span<const double> f;
    bool closed_tip;
    bool closed_end;
};

inline ProfileView view(const RadialProfile& p) {
    return {p.h(), p.phi(), p.f(), p.closed_tip(), p.closed_end()};
}

/// K = -(1/(f phi)) d/dr[(1/phi) df/dr]: compact conservative stencil inside,
/// one-sided second order at open ends, even extrapolation at closed ends.
/// Parallel over grid points.
void gauss_curvature_into(const ProfileView& p, std::span<double> out);
/// Serial reference of the same kernel.
void gauss_curvature_serial_into(const ProfileView& p, std::span<double> out);

std::vector<double> gauss_curvature(const RadialProfile& p);
std::vector<double> gauss_curvature_serial(const RadialProfile& p);

/// Product Sigma x S^1: (0, 0, 2K) sorted. Requires an untwisted metric.
CurvatureSpectrum spectrum_product(const Warped3Metric& m);
CurvatureSpectrum spectrum_of_surface_product(const RadialProfile& base);

/// Warping of the quotient by (r, theta, u) -> (r, theta + a tau, u + b tau):
/// F = f / sqrt(1 + (a/b)^2 f^2). Same grid, phi and time.
RadialProfile quotient_metric(const RadialProfile& p, double a, double b);

std::vector<double> scalar_from_spectrum(const CurvatureSpectrum& s);

}  // namespace rflab

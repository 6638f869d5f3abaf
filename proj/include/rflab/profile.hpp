#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rflab {

/// Tolerance on |f'(tip)/phi(tip) - 1/cone_order| for a closed tip.
inline constexpr double kDefaultTipTolerance = 1e-3;

/// Discretized rotationally symmetric surface metric phi(r)^2 dr^2 + f(r)^2 dtheta^2
/// on a uniform grid, at one flow time.
///
/// A closed tip (left end) or closed end (right end) is a rotation fixed point
/// where f vanishes. `theta_period` records the angular period in units of 2*pi;
/// rescaling f by c and the period by 1/c describes the same geometry.
class RadialProfile {
public:
    struct Options {
        bool closed_tip = false;
        bool closed_end = false;
        int cone_order = 1;
        double time_stamp = 0.0;
        double theta_period = 1.0;
        double tip_tolerance = kDefaultTipTolerance;
    };

    RadialProfile() = default;
    RadialProfile(std::vector<double> r, std::vector<double> phi, std::vector<double> f,
                  const Options& opts);
    RadialProfile(std::vector<double> r, std::vector<double> phi, std::vector<double> f)
        : RadialProfile(std::move(r), std::move(phi), std::move(f), Options{}) {}

    std::span<const double> r() const { return r_; }
    std::span<const double> phi() const { return phi_; }
    std::span<const double> f() const { return f_; }
    std::size_t size() const { return r_.size(); }
    double h() const { return h_; }
    bool closed_tip() const { return closed_tip_; }
    bool closed_end() const { return closed_end_; }
    int cone_order() const { return cone_order_; }
    double time_stamp() const { return time_stamp_; }
    double theta_period() const { return theta_period_; }

    Options options() const;

    /// Same grid and flags, new coefficient samples and time.
    RadialProfile with_values(std::vector<double> phi, std::vector<double> f,
                              double time_stamp) const;
    RadialProfile with_time(double time_stamp) const;

    /// f'(tip)/phi(tip) from the odd extension of f about the tip.
    double tip_slope_ratio() const;
    double end_slope_ratio() const;

private:
    std::vector<double> r_;
    std::vector<double> phi_;
    std::vector<double> f_;
    double h_ = 0.0;
    bool closed_tip_ = false;
    bool closed_end_ = false;
    int cone_order_ = 1;
    double time_stamp_ = 0.0;
    double theta_period_ = 1.0;
    double tip_tolerance_ = kDefaultTipTolerance;
};

/// Uniform grid r0, r0 + h, ..., r1 with n points.
std::vector<double> uniform_grid(double r0, double r1, std::size_t n);

/// Samples f and phi on a uniform grid.
template <class F, class Phi>
RadialProfile make_profile(double r0, double r1, std::size_t n, F&& f, Phi&& phi,
                           const RadialProfile::Options& opts = {}) {
    auto r = uniform_grid(r0, r1, n);
    std::vector<double> fv(n), pv(n);
    for (std::size_t j = 0; j < n; ++j) {
        fv[j] = f(r[j]);
        pv[j] = phi(r[j]);
    }
    return RadialProfile(std::move(r), std::move(pv), std::move(fv), opts);
}

/// Cumulative arclength s(r_j) = int_{r_0}^{r_j} phi dr (trapezoid rule).
std::vector<double> arclength(const RadialProfile& p);

/// Area 2*pi*theta_period * int f phi dr (trapezoid rule).
double area(const RadialProfile& p);

/// Resamples the profile onto a uniform arclength grid with spacing close to `ds`
/// so that phi == 1. Values come from cubic interpolation in s.
RadialProfile reparametrize_by_arclength(const RadialProfile& p, double ds);

/// Warped 3-metric: surface base times a fiber circle of circumference
/// `fiber_length`, optionally twisted by the Killing data (a d/dtheta, b d/du).
struct Warped3Metric {
    RadialProfile base;
    double fiber_length = 1.0;
    double twist_a = 0.0;
    double twist_b = 0.0;

    Warped3Metric() = default;
    Warped3Metric(RadialProfile base, double fiber_length, double a = 0.0, double b = 0.0);

    bool twisted() const { return twist_a != 0.0 || twist_b != 0.0; }
};

/// Per-point eigenvalues lambda1 <= lambda2 <= lambda3 of the curvature operator
/// (each twice a sectional curvature) with derived norms.
class CurvatureSpectrum {
public:
    CurvatureSpectrum() = default;
    /// Sorts each point's triple on construction.
    CurvatureSpectrum(std::vector<double> l1, std::vector<double> l2, std::vector<double> l3);

    std::span<const double> lambda1() const { return l1_; }
    std::span<const double> lambda2() const { return l2_; }
    std::span<const double> lambda3() const { return l3_; }
    std::span<const double> rm_norm() const { return norm_; }
    std::span<const double> scalar() const { return scalar_; }
    std::size_t size() const { return l1_.size(); }

    /// Multiplies every eigenvalue by s > 0.
    CurvatureSpectrum scaled(double s) const;

private:
    std::vector<double> l1_, l2_, l3_, norm_, scalar_;
};

}  // namespace rflab

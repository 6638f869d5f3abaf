#include "rflab/profile.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "rflab/error.hpp"
#include "rflab/interp.hpp"

namespace rflab {

namespace {

void check_finite(std::span<const double> v, const char* name) {
    for (double x : v)
        require(std::isfinite(x), ErrorCode::InvalidProfile, std::string(name) + " not finite");
}

}  // namespace

std::vector<double> uniform_grid(double r0, double r1, std::size_t n) {
    require(n >= 2 && r1 > r0, ErrorCode::InvalidArgument, "uniform_grid needs n >= 2, r1 > r0");
    std::vector<double> r(n);
    const double h = (r1 - r0) / static_cast<double>(n - 1);
    for (std::size_t j = 0; j < n; ++j) r[j] = r0 + h * static_cast<double>(j);
    r.back() = r1;
    return r;
}

RadialProfile::RadialProfile(std::vector<double> r, std::vector<double> phi,
                             std::vector<double> f, const Options& opts)
    : r_(std::move(r)),
      phi_(std::move(phi)),
      f_(std::move(f)),
      closed_tip_(opts.closed_tip),
      closed_end_(opts.closed_end),
      cone_order_(opts.cone_order),
      time_stamp_(opts.time_stamp),
      theta_period_(opts.theta_period),
      tip_tolerance_(opts.tip_tolerance) {
    const std::size_t n = r_.size();
    require(n >= 2, ErrorCode::InvalidProfile, "profile needs at least 2 points");
    require(phi_.size() == n && f_.size() == n, ErrorCode::InvalidProfile,
            "r, phi, f sizes differ");
    check_finite(r_, "r");
    check_finite(phi_, "phi");
    check_finite(f_, "f");
    require(std::isfinite(time_stamp_), ErrorCode::InvalidProfile, "time_stamp not finite");
    require(theta_period_ > 0.0, ErrorCode::InvalidProfile, "theta_period must be positive");
    require(cone_order_ >= 1, ErrorCode::InvalidProfile, "cone_order must be >= 1");
    require(cone_order_ == 1 || closed_tip_, ErrorCode::InvalidProfile,
            "cone_order > 1 requires a closed tip");

    h_ = (r_.back() - r_.front()) / static_cast<double>(n - 1);
    require(h_ > 0.0, ErrorCode::InvalidProfile, "r_grid must be strictly increasing");
    const double slack = 1e-8 * h_ + 1e-12 * std::max(std::abs(r_.front()), std::abs(r_.back()));
    for (std::size_t j = 0; j + 1 < n; ++j)
        require(std::abs(r_[j + 1] - r_[j] - h_) <= slack, ErrorCode::InvalidProfile,
                "r_grid must be uniform");

    for (std::size_t j = 0; j < n; ++j)
        require(phi_[j] > 0.0, ErrorCode::DegenerateMetric, "phi must be positive");
    for (std::size_t j = 1; j + 1 < n; ++j)
        require(f_[j] > 0.0, ErrorCode::DegenerateMetric, "f must be positive in the interior");
    if (closed_tip_)
        require(f_.front() == 0.0, ErrorCode::InvalidProfile, "closed tip needs f[0] == 0");
    else
        require(f_.front() > 0.0, ErrorCode::DegenerateMetric, "open left end needs f[0] > 0");
    if (closed_end_)
        require(f_.back() == 0.0, ErrorCode::InvalidProfile, "closed end needs f[n-1] == 0");
    else
        require(f_.back() > 0.0, ErrorCode::DegenerateMetric, "open right end needs f[n-1] > 0");

    if (closed_tip_ || closed_end_)
        require(n >= 3, ErrorCode::InvalidProfile, "closed ends need at least 3 points");
    const double want = 1.0 / static_cast<double>(cone_order_);
    if (closed_tip_)
        require(std::abs(tip_slope_ratio() - want) <= tip_tolerance_, ErrorCode::InvalidProfile,
                "tip not smooth: f'(0)/phi(0) = " + std::to_string(tip_slope_ratio()));
    if (closed_end_)
        require(std::abs(end_slope_ratio() - 1.0) <= tip_tolerance_, ErrorCode::InvalidProfile,
                "end not smooth: -f'/phi = " + std::to_string(end_slope_ratio()));
}

RadialProfile::Options RadialProfile::options() const {
    Options o;
    o.closed_tip = closed_tip_;
    o.closed_end = closed_end_;
    o.cone_order = cone_order_;
    o.time_stamp = time_stamp_;
    o.theta_period = theta_period_;
    o.tip_tolerance = tip_tolerance_;
    return o;
}

RadialProfile RadialProfile::with_values(std::vector<double> phi, std::vector<double> f,
                                         double time_stamp) const {
    Options o = options();
    o.time_stamp = time_stamp;
    return RadialProfile(r_, std::move(phi), std::move(f), o);
}

RadialProfile RadialProfile::with_time(double time_stamp) const {
    RadialProfile p = *this;
    p.time_stamp_ = time_stamp;
    return p;
}

double RadialProfile::tip_slope_ratio() const {
    // odd extension about the tip: f(h) = a h + b h^3, f(2h) = 2a h + 8b h^3
    return (8.0 * f_[1] - f_[2]) / (6.0 * h_) / phi_[0];
}

double RadialProfile::end_slope_ratio() const {
    const std::size_t n = f_.size();
    return (8.0 * f_[n - 2] - f_[n - 3]) / (6.0 * h_) / phi_[n - 1];
}

std::vector<double> arclength(const RadialProfile& p) {
    auto phi = p.phi();
    std::vector<double> s(p.size(), 0.0);
    for (std::size_t j = 1; j < s.size(); ++j) s[j] = s[j - 1] + 0.5 * p.h() * (phi[j - 1] + phi[j]);
    return s;
}

double area(const RadialProfile& p) {
    auto phi = p.phi();
    auto f = p.f();
    double acc = 0.0;
    for (std::size_t j = 0; j + 1 < p.size(); ++j)
        acc += 0.5 * p.h() * (f[j] * phi[j] + f[j + 1] * phi[j + 1]);
    return 2.0 * std::numbers::pi * p.theta_period() * acc;
}

RadialProfile reparametrize_by_arclength(const RadialProfile& p, double ds) {
    require(ds > 0.0, ErrorCode::InvalidArgument, "ds must be positive");
    const auto s = arclength(p);
    const double total = s.back();
    const auto m = static_cast<std::size_t>(std::llround(total / ds)) + 1;
    require(m >= 2, ErrorCode::InvalidArgument, "ds larger than the profile");
    auto snew = uniform_grid(0.0, total, m);
    const double r0 = p.r().front(), h = p.h();
    std::vector<double> fnew(m), phinew(m, 1.0);
    for (std::size_t k = 0; k < m; ++k) {
        // invert s(r) by bisection on the bracketing cell, then polish on the cubic
        std::size_t j = bracket(s, snew[k]);
        double lo = p.r()[j], hi = p.r()[j + 1];
        for (int it = 0; it < 60; ++it) {
            double mid = 0.5 * (lo + hi);
            if (cubic_uniform(r0, h, s, mid) < snew[k]) lo = mid; else hi = mid;
        }
        fnew[k] = cubic_uniform(r0, h, p.f(), 0.5 * (lo + hi));
    }
    auto o = p.options();
    if (o.closed_tip) fnew.front() = 0.0;
    if (o.closed_end) fnew.back() = 0.0;
    o.tip_tolerance = std::max(o.tip_tolerance, 1e-2);
    return RadialProfile(std::move(snew), std::move(phinew), std::move(fnew), o);
}

Warped3Metric::Warped3Metric(RadialProfile b, double eps, double a, double bb)
    : base(std::move(b)), fiber_length(eps), twist_a(a), twist_b(bb) {
    require(fiber_length > 0.0, ErrorCode::InvalidArgument, "fiber_length must be positive");
}

CurvatureSpectrum::CurvatureSpectrum(std::vector<double> l1, std::vector<double> l2,
                                     std::vector<double> l3)
    : l1_(std::move(l1)), l2_(std::move(l2)), l3_(std::move(l3)) {
    const std::size_t n = l1_.size();
    require(l2_.size() == n && l3_.size() == n, ErrorCode::InvalidArgument,
            "eigenvalue fields differ in size");
    norm_.resize(n);
    scalar_.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        double a = l1_[j], b = l2_[j], c = l3_[j];
        if (a > b) std::swap(a, b);
        if (b > c) std::swap(b, c);
        if (a > b) std::swap(a, b);
        l1_[j] = a;
        l2_[j] = b;
        l3_[j] = c;
        norm_[j] = std::sqrt(a * a + b * b + c * c);
        scalar_[j] = a + b + c;
    }
}

CurvatureSpectrum CurvatureSpectrum::scaled(double s) const {
    require(s > 0.0, ErrorCode::InvalidArgument, "spectrum scale must be positive");
    auto mul = [s](std::span<const double> v) {
        std::vector<double> out(v.begin(), v.end());
        for (double& x : out) x *= s;
        return out;
    };
    return CurvatureSpectrum(mul(l1_), mul(l2_), mul(l3_));
}

}  // namespace rflab

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "rflab/error.hpp"
#include "rflab/profile.hpp"

namespace testing {

inline double sech2(double x) {
    const double c = 1.0 / std::cosh(x);
    return c * c;
}

inline rflab::RadialProfile cigar(std::size_t n, double r1 = 8.0) {
    rflab::RadialProfile::Options o;
    o.closed_tip = true;
    return rflab::make_profile(0.0, r1, n, [](double r) { return std::tanh(r); },
                               [](double) { return 1.0; }, o);
}

inline rflab::RadialProfile sphere(std::size_t n, double radius = 1.0) {
    rflab::RadialProfile::Options o;
    o.closed_tip = o.closed_end = true;
    auto r = rflab::uniform_grid(0.0, M_PI * radius, n);
    std::vector<double> f(n), phi(n, 1.0);
    for (std::size_t j = 0; j < n; ++j) f[j] = radius * std::sin(r[j] / radius);
    f.front() = f.back() = 0.0;
    return rflab::RadialProfile(std::move(r), std::move(phi), std::move(f), o);
}

inline rflab::RadialProfile cylinder(std::size_t n, double length = 10.0, double radius = 1.0) {
    return rflab::make_profile(0.0, length, n, [radius](double) { return radius; },
                               [](double) { return 1.0; });
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b,
                           std::size_t from = 0, std::size_t trim = 0) {
    double m = 0.0;
    for (std::size_t j = from; j + trim < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
    return m;
}

template <class F>
std::optional<rflab::ErrorCode> code_of(F&& f) {
    try {
        f();
    } catch (const rflab::Error& e) {
        return e.code();
    }
    return std::nullopt;
}

}  // namespace testing

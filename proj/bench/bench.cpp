// Serial reference against OpenMP kernels: wall time, speedup and agreement.
#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>

#include "rflab/collapse.hpp"
#include "rflab/curvature.hpp"
#include "rflab/dilation.hpp"
#include "rflab/gh.hpp"

using namespace rflab;

namespace {

double seconds(const std::function<void()>& f, int reps) {
    f();
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < reps; ++i) f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / reps;
}

void report(const char* name, double serial, double parallel, bool same) {
    std::printf("%-22s serial %10.4f ms  parallel %10.4f ms  speedup %5.2fx  %s\n", name,
                1e3 * serial, 1e3 * parallel, serial / parallel, same ? "identical" : "MISMATCH");
}

FiniteMetricSpace planar(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = u(rng), y[i] = u(rng);
    return make_space(n, [&](std::size_t i, std::size_t j) { return std::hypot(x[i] - x[j], y[i] - y[j]); });
}

}  // namespace

int main() {
    std::printf("threads: %d\n", omp_get_max_threads());

    RadialProfile::Options o;
    o.closed_tip = true;
    const auto p = make_profile(0.0, 8.0, 400001, [](double r) { return std::tanh(r); },
                                [](double r) { return 1.0 + 0.1 * std::sin(r); }, o);
    std::vector<double> ks, kp;
    const double cs = seconds([&] { ks = gauss_curvature_serial(p); }, 20);
    const double cp = seconds([&] { kp = gauss_curvature(p); }, 20);
    report("gauss_curvature", cs, cp, ks == kp);

    const Warped3Metric m(make_profile(0.0, 8.0, 201, [](double r) { return std::tanh(r); },
                                       [](double) { return 1.0; }, o),
                          0.1);
    const SamplingWindow w{0.0, 3.0};
    const MetricGraph g(m, w);
    const auto pts = sample_coords(m.base, 64, 0, w, m.fiber_length);
    std::vector<double> ds, dp;
    const double gs = seconds([&] { ds = g.pairwise_serial(pts); }, 2);
    const double gp = seconds([&] { dp = g.pairwise(pts); }, 2);
    report("pairwise dijkstra", gs, gp, ds == dp);

    const auto A = planar(120, 1), B = planar(110, 2);
    GhBounds bs, bp;
    const double hs = seconds([&] { bs = gh_bound_serial(A, B, 32, 5); }, 2);
    const double hp = seconds([&] { bp = gh_bound(A, B, 32, 5); }, 2);
    report("gh_bound", hs, hp, bs.upper == bp.upper && bs.f == bp.f && bs.g == bp.g);

    SpectralHistory h;
    const std::size_t nt = 4001, np = 2000;
    for (std::size_t i = 0; i < nt; ++i) {
        const double t = 10.0 * static_cast<double>(i) / static_cast<double>(nt - 1);
        std::vector<double> z(np, 0.0), l3(np), pos(np);
        for (std::size_t j = 0; j < np; ++j) {
            l3[j] = std::exp(t) * (1.0 + 0.1 * std::sin(0.01 * static_cast<double>(j) + t));
            pos[j] = 0.01 * static_cast<double>(j);
        }
        h.times.push_back(t);
        h.positions.push_back(std::move(pos));
        h.spectra.emplace_back(z, z, l3);
    }
    DilationRecord rs, rp;
    const double ss = seconds([&] { rs = select_point_serial(h, 10.0, 0.1); }, 10);
    const double sp = seconds([&] { rp = select_point(h, 10.0, 0.1); }, 10);
    report("select_point", ss, sp, rs.time_index == rp.time_index && rs.point_index == rp.point_index);
    return 0;
}

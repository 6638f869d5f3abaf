#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "rflab/collapse.hpp"
#include "rflab/gh.hpp"

using namespace rflab;
using namespace testing;

namespace {

FiniteMetricSpace point() { return FiniteMetricSpace(1, {0.0}); }

FiniteMetricSpace circle(std::size_t n, double radius = 1.0) {
    return make_space(n, [=](std::size_t i, std::size_t j) {
        const double k = static_cast<double>(std::min(j - i, n - (j - i)));
        return 2.0 * M_PI * radius * k / static_cast<double>(n);
    });
}

// Random points in the plane, so the axioms hold by construction.
FiniteMetricSpace random_planar(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = u(rng), y[i] = u(rng);
    return make_space(n, [&](std::size_t i, std::size_t j) { return std::hypot(x[i] - x[j], y[i] - y[j]); });
}

// Exhaustive correspondence search over subsets of A x B.
double brute_gh(const FiniteMetricSpace& A, const FiniteMetricSpace& B) {
    const std::size_t n = A.size(), m = B.size(), k = n * m;
    double best = 1e300;
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << k); ++mask) {
        std::vector<bool> ca(n, false), cb(m, false);
        for (std::size_t e = 0; e < k; ++e)
            if (mask >> e & 1) ca[e / m] = cb[e % m] = true;
        bool ok = true;
        for (bool c : ca) ok = ok && c;
        for (bool c : cb) ok = ok && c;
        if (!ok) continue;
        double dis = 0.0;
        for (std::size_t e1 = 0; e1 < k; ++e1)
            if (mask >> e1 & 1)
                for (std::size_t e2 = 0; e2 < k; ++e2)
                    if (mask >> e2 & 1)
                        dis = std::max(dis, std::abs(A(e1 / m, e2 / m) - B(e1 % m, e2 % m)));
        best = std::min(best, dis);
    }
    return 0.5 * best;
}

}  // namespace

TEST_CASE("exact GH on small examples") {
    const auto two = make_space(2, [](auto, auto) { return 1.0; });
    const auto tri = make_space(3, [](auto, auto) { return 1.0; });
    const auto two2 = make_space(2, [](auto, auto) { return 2.0; });
    CHECK(gh_exact(two, point(), GhMode::Unpointed) == doctest::Approx(0.5));
    CHECK(gh_exact(tri, point(), GhMode::Unpointed) == doctest::Approx(0.5));
    CHECK(gh_exact(two, two2, GhMode::Unpointed) == doctest::Approx(0.5));
    CHECK(gh_exact(circle(6), point(), GhMode::Unpointed) == doctest::Approx(M_PI / 2.0));
    CHECK(gh_exact(tri, tri) == 0.0);
}

TEST_CASE("exact GH agrees with exhaustive correspondences") {
    for (std::uint64_t s = 0; s < 6; ++s) {
        const auto A = random_planar(3, 2 * s);
        const auto B = random_planar(3, 2 * s + 1);
        CHECK(gh_exact(A, B, GhMode::Unpointed) == doctest::Approx(brute_gh(A, B)).epsilon(1e-12));
    }
}

TEST_CASE("GH is a pseudometric and scales linearly") {
    const auto A = random_planar(5, 1), B = random_planar(6, 2), C = random_planar(4, 3);
    const double ab = gh_exact(A, B), ba = gh_exact(B, A);
    const double ac = gh_exact(A, C), cb = gh_exact(C, B);
    CHECK(ab == doctest::Approx(ba));
    CHECK(ab <= ac + cb + 1e-12);
    CHECK(gh_exact(A, A) == 0.0);
    CHECK(gh_exact(A.scaled(3.0), B.scaled(3.0)) == doctest::Approx(3.0 * ab));
    CHECK(gh_exact(A, B, GhMode::Unpointed) <= ab + 1e-12);
}

TEST_CASE("bounds sandwich the exact value") {
    for (std::uint64_t s = 0; s < 8; ++s) {
        const auto A = random_planar(6, 10 + s), B = random_planar(7, 30 + s);
        for (GhMode mode : {GhMode::Pointed, GhMode::Unpointed}) {
            const double e = gh_exact(A, B, mode);
            const auto b = gh_bound(A, B, 16, s, mode);
            CHECK(b.lower <= e + 1e-12);
            CHECK(e <= b.upper + 1e-12);
            CHECK(b.upper == doctest::Approx(0.5 * distortion(A, B, b.f, b.g)));
            if (mode == GhMode::Pointed) {
                CHECK(b.f[A.base()] == B.base());
                CHECK(b.g[B.base()] == A.base());
            }
        }
    }
}

TEST_CASE("bound: serial and parallel are identical and deterministic") {
    const auto A = random_planar(40, 5), B = random_planar(35, 6);
    const auto p = gh_bound(A, B, 12, 9);
    const auto s = gh_bound_serial(A, B, 12, 9);
    CHECK(p.upper == s.upper);
    CHECK(p.lower == s.lower);
    CHECK(p.f == s.f);
    CHECK(p.g == s.g);
    CHECK(gh_bound(A, B, 12, 9).upper == p.upper);
}

TEST_CASE("circle against a point") {
    const auto b = gh_bound(circle(40), point(), 8, 0, GhMode::Unpointed);
    CHECK(b.upper == doctest::Approx(M_PI / 2.0));
    CHECK(b.lower == doctest::Approx(M_PI / 2.0));
}

TEST_CASE("exact size cap") {
    const auto A = random_planar(9, 1);
    CHECK(code_of([&] { gh_exact(A, A); }) == ErrorCode::TooLarge);
    CHECK(code_of([&] { gh_exact(random_planar(5, 1), A, GhMode::Pointed, 4); }) == ErrorCode::TooLarge);
    CHECK(code_of([&] { gh_exact(A, A, GhMode::Pointed, 20); }) == ErrorCode::TooLarge);
}

TEST_CASE("dimension estimates") {
    const auto I = sample_interval(0.0, 1.0, 300, 1);
    const auto d = dim_estimate(I);
    CHECK(d.dimension == doctest::Approx(1.0).epsilon(0.1));
    CHECK(d.scales_used >= 3);
    CHECK(dim_estimate(I.scaled(7.0)).dimension == doctest::Approx(d.dimension).epsilon(1e-9));

    const auto P = random_planar(400, 4);
    CHECK(dim_estimate(P).dimension == doctest::Approx(2.0).epsilon(0.2));

    CHECK(dim_estimate(point()).dimension == 0.0);
    const auto eq = make_space(20, [](auto, auto) { return 1.0; });
    CHECK(code_of([&] { dim_estimate(eq); }) == ErrorCode::DegenerateScales);
}

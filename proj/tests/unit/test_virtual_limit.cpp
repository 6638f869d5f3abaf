#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "rflab/curvature.hpp"
#include "rflab/flow.hpp"
#include "rflab/interp.hpp"
#include "rflab/virtual_limit.hpp"

using namespace rflab;
using namespace testing;

namespace {

double wave_f(double r) { return 1.0 + 0.3 * std::sin(r); }
double wave_phi(double r) { return 1.0 + 0.1 * std::cos(0.7 * r); }

RadialProfile wave(double r0, double r1, std::size_t n, double shift = 0.0) {
    return make_profile(r0, r1, n, [=](double r) { return wave_f(r + shift); },
                        [=](double r) { return wave_phi(r + shift); });
}

RadialProfile closed_tip_profile(double r1, std::size_t n, double (*f)(double), double scale = 1.0) {
    RadialProfile::Options o;
    o.closed_tip = true;
    o.tip_tolerance = 1e9;
    return make_profile(0.0, r1, n, [=](double r) { return scale * f(r); }, [](double) { return 1.0; }, o);
}

double tanh_half(double r) { return 0.5 * std::tanh(r); }
double tanh_fn(double r) { return std::tanh(r); }
double sin_fn(double r) { return std::sin(r); }

}  // namespace

TEST_CASE("overlap recovers a known shift") {
    const double h = 0.02;
    const auto left = wave(0.0, 6.0, 301);
    for (double shift : {2.37, 2.0, 2.513}) {
        const auto right = wave(-1.0, 3.0, 201, shift);
        const auto fit = overlap_identify(left, right, {1.5, 3.5});
        CHECK(std::abs(fit.r0 - shift) < h / 8.0);
        CHECK(fit.residual < 1e-4);
        CHECK(fit.overlap_length >= 2.0 * h);
    }
    const auto same = overlap_identify(left, left, {-0.5, 0.5});
    CHECK(std::abs(same.r0) < 1e-12);
    CHECK(same.residual < 1e-12);
}

TEST_CASE("overlap: finer grids fit better and noise is tolerated") {
    const auto coarse = overlap_identify(wave(0.0, 6.0, 61), wave(-1.0, 3.0, 41, 2.37), {1.5, 3.5});
    const auto fine = overlap_identify(wave(0.0, 6.0, 601), wave(-1.0, 3.0, 401, 2.37), {1.5, 3.5});
    CHECK(std::abs(fine.r0 - 2.37) <= std::abs(coarse.r0 - 2.37) + 1e-12);

    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-1e-4, 1e-4);
    const auto clean = wave(-1.0, 3.0, 201, 2.37);
    std::vector<double> f(clean.f().begin(), clean.f().end());
    for (double& v : f) v += u(rng);
    const RadialProfile noisy(std::vector<double>(clean.r().begin(), clean.r().end()),
                              std::vector<double>(clean.phi().begin(), clean.phi().end()), f);
    const auto fit = overlap_identify(wave(0.0, 6.0, 301), noisy, {1.5, 3.5});
    CHECK(std::abs(fit.r0 - 2.37) < 0.02);
    CHECK(fit.residual < kOverlapTolerance);

    // shifts add up across a chain
    const auto a = wave(0.0, 6.0, 301), b = wave(-1.0, 5.0, 301, 1.7), c = wave(-1.0, 5.0, 301, 3.1);
    const double ab = overlap_identify(a, b, {1.0, 2.5}).r0;
    const double bc = overlap_identify(b, c, {0.5, 2.0}).r0;
    const double ac = overlap_identify(a, c, {2.5, 3.5}).r0;
    CHECK(ab + bc == doctest::Approx(ac).epsilon(1e-3));
}

TEST_CASE("overlap rejects unrelated profiles") {
    const auto left = wave(0.0, 6.0, 301);
    const auto other = make_profile(-1.0, 3.0, 201, [](double r) { return 2.0 + r * r; },
                                    [](double) { return 3.0; });
    CHECK(code_of([&] { overlap_identify(left, other, {1.5, 3.5}); }) == ErrorCode::NoOverlap);
    CHECK(code_of([&] { overlap_identify(left, wave(50.0, 54.0, 201), {1.5, 3.5}); }) == ErrorCode::NoOverlap);
}

TEST_CASE("cut then glue reproduces the profile") {
    const auto p = cigar(241, 12.0);
    const double h = p.h();
    const auto windows = cut_windows(p, 1.0);
    CHECK(windows.size() == 4);
    CHECK(windows[0].profile.closed_tip());
    CHECK(!windows[1].profile.closed_tip());
    const auto g = glue(windows);
    CHECK(g.profile.theta_period() == 1.0);
    CHECK(g.max_residual < 1e-3);
    for (std::size_t k = 0; k + 1 < g.windows.size(); ++k) {
        REQUIRE(g.windows[k].overlap_right.has_value());
        CHECK(g.windows[k].overlap_right->r0 == doctest::Approx(4.0).epsilon(1e-3));
    }
    double err = 0.0;
    for (std::size_t j = 0; j < g.profile.size(); ++j) {
        const double r = g.profile.r()[j];
        if (r > p.r().back()) break;
        err = std::max(err, std::abs(g.profile.f()[j] - std::tanh(r)));
    }
    CHECK(err < 2.0 * h * h);
}

TEST_CASE("glue failure modes") {
    CHECK(code_of([] { glue(cut_windows(sphere(201, 3.0))); }) == ErrorCode::TwoClosedEnds);

    auto windows = cut_windows(cigar(241, 12.0));
    std::vector<double> f(windows[1].profile.f().begin(), windows[1].profile.f().end());
    for (double& v : f) v *= 1.2;
    windows[1].profile = RadialProfile(std::vector<double>(windows[1].profile.r().begin(), windows[1].profile.r().end()),
                                       std::vector<double>(windows[1].profile.phi().begin(), windows[1].profile.phi().end()), f);
    const auto code = code_of([&] { glue(windows); });
    CHECK((code == ErrorCode::SeamMismatch || code == ErrorCode::NoOverlap));
}

TEST_CASE("extension to a disk") {
    const auto t = extend_to_disk(closed_tip_profile(5.0, 201, tanh_fn));
    CHECK(t.cone_order() == 1);
    CHECK(t.f()[100] == doctest::Approx(std::tanh(2.5)).epsilon(1e-3));

    const auto half = extend_to_disk(closed_tip_profile(5.0, 201, tanh_half));
    CHECK(half.cone_order() == 2);
    CHECK(half.tip_slope_ratio() == doctest::Approx(0.5).epsilon(1e-9));

    CHECK(extend_to_disk(closed_tip_profile(M_PI / 2.0, 101, sin_fn)).cone_order() == 1);

    const auto big = extend_to_disk(closed_tip_profile(5.0, 201, tanh_fn, 1.01));
    CHECK(big.cone_order() == 1);
    CHECK(big.f()[100] == doctest::Approx(std::tanh(2.5)).epsilon(1e-3));
    CHECK(big.theta_period() == doctest::Approx(1.01).epsilon(1e-3));

    CHECK(code_of([] { extend_to_disk(closed_tip_profile(5.0, 201, tanh_fn, 0.7)); }) ==
          ErrorCode::ClosureFailure);

    RadialProfile::Options o;
    o.closed_end = true;
    o.tip_tolerance = 1e9;
    const auto mirrored = make_profile(0.0, 5.0, 201, [](double r) { return std::tanh(5.0 - r); },
                                       [](double) { return 1.0; }, o);
    const auto m = extend_to_disk(mirrored);
    CHECK(m.closed_tip());
    CHECK(m.f()[40] == doctest::Approx(std::tanh(1.0)).epsilon(1e-3));
}

TEST_CASE("local model table") {
    struct Row {
        int m;
        GammaDescriptor g;
        bool fixed;
        double b;
        const char* id;
        const char* gamma;
        const char* g0;
        const char* topo;
        int p;
    };
    const Row rows[] = {
        {1, {GammaKind::Trivial, 1}, false, 1.0, "1i", "trivial", "R2_loc", "open_interval", 0},
        {1, {GammaKind::Z2ThetaU, 2}, false, 1.0, "1ii", "Z2_theta_u", "R2_loc", "open_interval", 0},
        {1, {GammaKind::Z2RU, 2}, false, 1.0, "1iii", "Z2_r_u", "R2_loc", "half_interval", 0},
        {1, {GammaKind::Z2RTheta, 2}, false, 1.0, "1iv", "Z2_r_theta", "R2_loc", "half_interval", 0},
        {2, {GammaKind::SO2, 1}, true, 1.0, "2ai", "SO2", "R1_loc x SO(2)", "half_interval", 0},
        {2, {GammaKind::O2, 1}, true, 1.0, "2aii", "O2", "R1_loc x SO(2)", "half_interval", 0},
        {2, {GammaKind::Zp, 3}, false, 0.0, "2bi", "Zp", "R_loc", "disk_mod_Zp", 3},
        {2, {GammaKind::D2p, 4}, false, 0.0, "2bii", "D2p", "R_loc", "disk_mod_D2p", 4},
    };
    for (const auto& r : rows) {
        const auto lm = classify_local_model(r.m, r.g, 0.5, r.b, r.fixed);
        CHECK(!lm.excluded);
        CHECK(lm.case_id == r.id);
        CHECK(lm.g_infty0 == r.g0);
        CHECK(lm.local_topology == r.topo);
        CHECK(lm.p == r.p);
        CHECK(lm.gamma.rfind(r.gamma, 0) == 0);
        CHECK(classify_local_model(r.m, r.g, 0.5, r.b, r.fixed) == lm);
    }
    const auto c0 = classify_local_model(0, {}, 0.0, 1.0, false);
    CHECK(c0.excluded);
    CHECK(c0.exclusion == "Case 0 cannot occur because of the unbounded diameters assumption");
    const auto c3 = classify_local_model(3, {}, 0.0, 1.0, false);
    CHECK(c3.excluded);
    CHECK(c3.exclusion == "Case 3 cannot occur");

    CHECK(code_of([] { classify_local_model(1, {}, 0.0, 1.0, true); }) == ErrorCode::InconsistentInput);
    CHECK(code_of([] { classify_local_model(2, {GammaKind::SO2, 1}, 0.0, 1.0, false); }) == ErrorCode::InconsistentInput);
    CHECK(code_of([] { classify_local_model(2, {GammaKind::SO2, 1}, 0.0, 0.0, true); }) == ErrorCode::InconsistentInput);
    CHECK(code_of([] { classify_local_model(2, {GammaKind::Zp, 0}, 0.0, 0.0, false); }) == ErrorCode::InconsistentInput);
    CHECK(code_of([] { classify_local_model(1, {GammaKind::O2, 1}, 0.0, 1.0, false); }) == ErrorCode::InconsistentInput);
    CHECK(code_of([] { classify_local_model(4, {}, 0.0, 1.0, false); }) == ErrorCode::InconsistentInput);
}

TEST_CASE("gamma strings") {
    CHECK(parse_gamma("Zp(5)")->p == 5);
    CHECK(parse_gamma("D2p", 3)->p == 3);
    CHECK(parse_gamma("O2")->kind == GammaKind::O2);
    CHECK(!parse_gamma("Z7").has_value());
    CHECK(!parse_gamma("Zp(x)").has_value());
    for (const char* s : {"trivial", "Z2_theta_u", "Z2_r_u", "Z2_r_theta", "SO2", "O2"})
        CHECK(to_string(*parse_gamma(s)) == s);
}

TEST_CASE("singular points") {
    const OrbifoldPoint cone{3, 0.0, 3, false};
    const OrbifoldPoint dihedral{9, 2.0, 2, true};
    const OrbifoldPoint smooth{5, 1.0, 1, false};
    CHECK(detect_singular_points({smooth}, 1.0).singular.empty());
    const auto one = detect_singular_points({cone, smooth}, 1.0);
    CHECK(one.singular.size() == 1);
    CHECK(!one.rule_violation);
    const auto two = detect_singular_points({cone, dihedral}, 0.5);
    CHECK(two.rule_violation);
    CHECK(!two.diagnostic.empty());
    CHECK(!detect_singular_points({cone, dihedral}, 0.0).rule_violation);
}

TEST_CASE("comparison with the cigar soliton") {
    const auto p = cigar(201);
    const auto rep = cigar_compare(p);
    CHECK(rep.sigma == doctest::Approx(1.0).epsilon(2e-3));
    CHECK(rep.deviation < 2.0 * p.h() * p.h());
    REQUIRE(!rep.curve.empty());
    CHECK(rep.curve.front().second == doctest::Approx(1.0));

    // a rescaled cigar is still a cigar
    const double lam = 2.5;
    RadialProfile::Options o;
    o.closed_tip = true;
    const auto q = make_profile(0.0, 8.0 * lam, 201, [=](double r) { return lam * std::tanh(r / lam); },
                                [](double) { return 1.0; }, o);
    const auto rq = cigar_compare(q);
    CHECK(rq.deviation == doctest::Approx(rep.deviation).epsilon(1e-6));
    CHECK(rq.sigma == doctest::Approx(rep.sigma / lam).epsilon(1e-9));

    const auto cap = cigar_compare(sphere(201));
    CHECK(cap.deviation > 0.1);

    const auto hyp = make_profile(0.0, 2.0, 101, [](double r) { return std::sinh(r); },
                                  [](double) { return 1.0; }, o);
    CHECK(code_of([&] { cigar_compare(hyp); }) == ErrorCode::NotPositive);

    EvolveOptions eo;
    eo.record_interval = 0.1;
    const auto sol = evolve(p, 0.5, eo);
    const auto rs = cigar_compare(sol);
    CHECK(rs.deviation < 1e-2);
    CHECK(rs.k_tip_drift < 1e-2);
    CHECK(rs.sup_scalar_drift < 1e-2);
}

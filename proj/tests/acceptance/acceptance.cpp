// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rflab/collapse.hpp"
#include "rflab/curvature.hpp"
#include "rflab/dilation.hpp"
#include "rflab/error.hpp"
#include "rflab/flow.hpp"
#include "rflab/gh.hpp"
#include "rflab/io.hpp"
#include "rflab/pinching.hpp"
#include "rflab/pipeline.hpp"
#include "rflab/profile.hpp"
#include "rflab/virtual_limit.hpp"

using namespace rflab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void expect(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
    void note(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", x);
    return buf;
}

double sech2(double x) {
    const double c = 1.0 / std::cosh(x);
    return c * c;
}

RadialProfile cigar(std::size_t n, double r1 = 8.0) {
    RadialProfile::Options o;
    o.closed_tip = true;
    return make_profile(0.0, r1, n, [](double r) { return std::tanh(r); }, [](double) { return 1.0; }, o);
}

RadialProfile sphere(std::size_t n) {
    RadialProfile::Options o;
    o.closed_tip = o.closed_end = true;
    auto r = uniform_grid(0.0, M_PI, n);
    std::vector<double> f(n), phi(n, 1.0);
    for (std::size_t j = 0; j < n; ++j) f[j] = std::sin(r[j]);
    f.front() = f.back() = 0.0;
    return RadialProfile(std::move(r), std::move(phi), std::move(f), o);
}

template <class F>
bool throws_code(ErrorCode code, F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code() == code;
    }
    return false;
}

// ---- 1 ---------------------------------------------------------------------

Outcome curvature_kernels() {
    Outcome o;
    double err[2];
    const std::size_t ns[2] = {401, 801};
    for (int k = 0; k < 2; ++k) {
        const auto p = cigar(ns[k]);
        const auto K = gauss_curvature(p);
        err[k] = 0.0;
        for (std::size_t j = 0; j < p.size(); ++j)
            err[k] = std::max(err[k], std::abs(K[j] - 2.0 * sech2(p.r()[j])));
        o.expect(err[k] < 4.0 * p.h() * p.h(), "error " + fmt(err[k]) + " at h = " + fmt(p.h()));
    }
    const double ratio = err[0] / err[1];
    o.expect(ratio >= 3.5 && ratio <= 4.5, "convergence ratio " + fmt(ratio));
    o.note("max err " + fmt(err[0]) + ", " + fmt(err[1]) + ", ratio " + fmt(ratio));
    return o;
}

// ---- 2 ---------------------------------------------------------------------

Outcome flow_correctness() {
    Outcome o;
    EvolveOptions eo;
    eo.record_interval = 0.05;
    const auto sol = evolve(sphere(201), 0.4, eo);
    const double A0 = area(sol[0]);
    double k_err = 1.0, area_err = 0.0;
    for (std::size_t i = 0; i < sol.size(); ++i) {
        const double t = sol.times()[i];
        area_err = std::max(area_err, std::abs(area(sol[i]) - (A0 - 8.0 * M_PI * t)) / A0);
        if (std::abs(t - 0.25) < 1e-12) {
            const auto K = gauss_curvature(sol[i]);
            k_err = 0.0;
            for (double k : K) k_err = std::max(k_err, std::abs(k / 2.0 - 1.0));
        }
    }
    o.expect(k_err < 1e-3, "K(0.25) relative error " + fmt(k_err));
    o.expect(area_err < 1e-2, "area law error " + fmt(area_err));
    o.note("K(0.25) rel err " + fmt(k_err) + ", area err " + fmt(area_err));
    return o;
}

// ---- 3 ---------------------------------------------------------------------

Outcome cigar_steadiness() {
    Outcome o;
    EvolveOptions eo;
    eo.record_interval = 0.05;
    const auto sol = evolve(cigar(201), 1.0, eo);
    const auto rep = cigar_compare(sol);
    o.expect(rep.sup_scalar_drift < 0.01, "sup R drift " + fmt(rep.sup_scalar_drift));
    o.expect(rep.deviation < 0.02, "deviation " + fmt(rep.deviation));
    o.note("sup R drift " + fmt(rep.sup_scalar_drift) + ", deviation " + fmt(rep.deviation));
    return o;
}

// ---- 4 ---------------------------------------------------------------------

Outcome pinching_suite() {
    Outcome o;
    const PinchingParams p{1.0, 0.0};
    auto hi = [](double l1, double C0, double t) {
        return -l1 * (std::log(-l1) + std::log(1.0 + C0 * t) - std::log(C0) - 3.0);
    };
    auto l3 = [](double l1, double C0, double t) {
        return -0.5 * l1 * std::log(-l1 * (1.0 / C0 + t) * std::exp(-2.0));
    };
    o.expect(std::abs(hamilton_ivey_threshold(-1.0, p, 0.0) - hi(-1.0, 1.0, 0.0)) < 1e-12 &&
                 std::abs(hi(-1.0, 1.0, 0.0) + 3.0) < 1e-12,
             "threshold at lambda1 = -1");
    for (double C0 : {0.5, 2.0})
        for (double t : {0.0, 1.3}) {
            const double l1 = -C0 * std::exp(3.0) / (1.0 + C0 * t);
            o.expect(std::abs(hamilton_ivey_threshold(l1, {C0, 0.0}, t)) < 1e-12 * std::abs(l1),
                     "threshold root");
        }
    o.expect(std::abs(hamilton_ivey_threshold(-1e-9, p, 0.0)) < 3e-8, "threshold small limit");

    for (double C0 : {0.5, 2.0})
        for (double t : {0.0, 1.3}) {
            const double l1 = -std::exp(2.0) / (1.0 / C0 + t);
            o.expect(std::abs(lambda3_lower_bound(l1, {C0, 0.0}, t)) < 1e-12, "lambda3 root");
        }
    o.expect(std::abs(lambda3_lower_bound(-std::exp(4.0), p, 0.0) - std::exp(4.0)) < 1e-12,
             "lambda3 at -e^4");
    o.expect(std::abs(lambda3_lower_bound(-1.0, p, 0.0) - l3(-1.0, 1.0, 0.0)) < 1e-12,
             "lambda3 at -1");

    EvolveOptions eo;
    eo.record_interval = 0.1;
    std::size_t lifts = 0;
    for (const auto& sol : {evolve(sphere(101), 0.4, eo), evolve(cigar(201), 0.5, eo)}) {
        std::vector<CurvatureSpectrum> spectra;
        for (const auto& q : sol.profiles()) spectra.push_back(spectrum_of_surface_product(q));
        o.expect(check_pinching(sol.times(), spectra, p).holds(), "product lift flagged");
        ++lifts;
    }
    const double big = std::exp(4.0);
    const std::vector<CurvatureSpectrum> bad{CurvatureSpectrum({-big}, {0.0}, {0.0})};
    const std::vector<double> tbad{std::exp(-1.0) - 1.0};
    o.expect(check_pinching(tbad, bad, p).violations.size() == 1, "counterexample not flagged");
    const std::vector<CurvatureSpectrum> fine{CurvatureSpectrum({-1.0}, {0.0}, {0.0})};
    const std::vector<double> t0{0.0};
    o.expect(check_pinching(t0, fine, p).holds(), "lambda = (-1, 0, 0) flagged");
    o.note(std::to_string(lifts) + " product lifts clean, counterexample flagged");
    return o;
}

// ---- 5 ---------------------------------------------------------------------

SpectralHistory exp_history() {
    SpectralHistory h;
    const std::size_t nt = 1001, np = 16;
    for (std::size_t i = 0; i < nt; ++i) {
        const double t = 10.0 * static_cast<double>(i) / static_cast<double>(nt - 1);
        std::vector<double> z(np, 0.0), l3(np), pos(np);
        for (std::size_t j = 0; j < np; ++j) {
            l3[j] = std::exp(t) * (1.0 + 0.05 * std::sin(static_cast<double>(j) + 0.3 * t));
            pos[j] = 0.25 * static_cast<double>(j);
        }
        h.times.push_back(t);
        h.positions.push_back(pos);
        h.spectra.emplace_back(z, z, l3);
    }
    return h;
}

Outcome dilation() {
    Outcome o;
    const auto h = exp_history();
    double prev_alpha = 0.0;
    for (double T : {4.0, 7.0, 10.0}) {
        std::size_t bi = 0, bj = 0;
        double best = -1.0;
        for (std::size_t i = 0; i < h.times.size(); ++i) {
            const double t = h.times[i];
            if (t > T) break;
            for (std::size_t j = 0; j < h.points(); ++j) {
                const double v = t * (T - t) * h.spectra[i].rm_norm()[j];
                if (v > best) best = v, bi = i, bj = j;
            }
        }
        const auto rec = select_point(h, T, 0.1);
        o.expect(rec.time_index == bi && rec.point_index == bj, "argmax differs at T = " + fmt(T));
        o.expect(rec.alpha_i > prev_alpha, "alpha not increasing at T = " + fmt(T));
        prev_alpha = rec.alpha_i;

        const auto g = rescale(h, rec, -0.5 * rec.alpha_i, 0.5 * rec.omega_i);
        double worst = -1e300;
        for (std::size_t i = 0; i < g.times.size(); ++i) {
            if (g.times[i] == 0.0)
                o.expect(std::abs(g.spectra[i].rm_norm()[rec.point_index] - 1.0) < 1e-6, "normalization");
            for (double v : g.spectra[i].rm_norm()) worst = std::max(worst, v - rescaled_bound(rec, g.times[i]));
        }
        o.expect(worst <= 1e-8, "bound exceeded by " + fmt(worst));
        o.note("T=" + fmt(T) + " alpha " + fmt(rec.alpha_i));
    }
    return o;
}

// ---- 6 ---------------------------------------------------------------------

FiniteMetricSpace random_space(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.1, 1.0);
    std::vector<double> d(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) d[i * n + j] = d[j * n + i] = u(rng);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                d[i * n + j] = std::min(d[i * n + j], d[i * n + k] + d[k * n + j]);
    std::uniform_int_distribution<std::size_t> b(0, n - 1);
    return FiniteMetricSpace(n, std::move(d), b(rng));
}

Outcome collapse_gh() {
    Outcome o;
    const SamplingWindow w{0.0, 3.0};
    const GraphResolution res{};
    const auto base = cigar(201);
    const auto B = sample_space(base, 64, 0, w, res);
    std::vector<double> up;
    for (double eps : {0.2, 0.1, 0.05}) {
        const auto A = sample_space(Warped3Metric(base, eps), 64, 0, w, res);
        const auto b = gh_bound(A, B);
        o.expect(b.upper <= 4.0 * eps, "upper " + fmt(b.upper) + " > 4 eps");
        up.push_back(b.upper);
    }
    for (std::size_t i = 0; i + 1 < up.size(); ++i)
        o.expect(up[i] >= 1.5 * up[i + 1], "halving factor " + fmt(up[i] / up[i + 1]));
    o.note("gh upper " + fmt(up[0]) + ", " + fmt(up[1]) + ", " + fmt(up[2]));

    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<std::size_t> sz(1, 5);
    std::size_t bad = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto X = random_space(sz(rng), rng), Y = random_space(sz(rng), rng), Z = random_space(sz(rng), rng);
        for (GhMode m : {GhMode::Pointed, GhMode::Unpointed}) {
            const double xy = gh_exact(X, Y, m), yx = gh_exact(Y, X, m);
            const double xz = gh_exact(X, Z, m), zy = gh_exact(Z, Y, m);
            if (gh_exact(X, X, m) != 0.0 || std::abs(xy - yx) > 1e-12 || xy < 0.0 || xy > xz + zy + 1e-12) ++bad;
        }
    }
    o.expect(bad == 0, std::to_string(bad) + " axiom failures");

    const auto di = dim_estimate(sample_interval(0.0, 1.0, 256, 0)).dimension;
    RadialProfile::Options closed;
    closed.closed_tip = true;
    const auto disk = make_profile(0.0, 1.0, 101, [](double r) { return r; }, [](double) { return 1.0; }, closed);
    const auto dd = dim_estimate(sample_space(disk, 256, 0, {0.0, 1.0}, res)).dimension;
    o.expect(std::abs(di - 1.0) <= 0.2, "interval dimension " + fmt(di));
    o.expect(std::abs(dd - 2.0) <= 0.3, "disk dimension " + fmt(dd));
    o.note("axioms ok over 1000 trials, dim " + fmt(di) + " / " + fmt(dd));
    return o;
}

// ---- 7 ---------------------------------------------------------------------

Outcome gluing() {
    Outcome o;
    const auto p = cigar(241, 12.0);
    const double h = p.h();
    const auto g = glue(cut_windows(p));
    double err = 0.0;
    for (std::size_t j = 0; j < g.profile.size() && g.profile.r()[j] <= p.r().back(); ++j)
        err = std::max(err, std::abs(g.profile.f()[j] - std::tanh(g.profile.r()[j])));
    o.expect(err <= 2.0 * h * h, "reglue error " + fmt(err));

    auto wave = [](double shift) {
        return [shift](double r) { return 1.0 + 0.3 * std::sin(r + shift); };
    };
    const auto left = make_profile(0.0, 6.0, 301, wave(0.0), [](double) { return 1.0; });
    const double hl = left.h();
    double worst = 0.0;
    for (double s : {1.9, 2.37, 2.513}) {
        const auto right = make_profile(-1.0, 3.0, 201, wave(s), [](double) { return 1.0; });
        worst = std::max(worst, std::abs(overlap_identify(left, right, {1.5, 3.5}).r0 - s));
    }
    o.expect(worst < hl / 8.0, "shift error " + fmt(worst));

    o.expect(throws_code(ErrorCode::TwoClosedEnds, [] { glue(cut_windows(sphere(201))); }),
             "sphere did not raise TwoClosedEnds");

    const auto K = gauss_curvature(quotient_metric(cigar(401), 1.0, 1.0));
    double kmin = 1e300;
    for (double k : K) kmin = std::min(kmin, k);
    o.expect(kmin > 0.0, "quotient min K " + fmt(kmin));
    o.note("reglue err " + fmt(err) + ", shift err " + fmt(worst) + ", quotient min K " + fmt(kmin));
    return o;
}

// ---- 8 ---------------------------------------------------------------------

Outcome classification() {
    Outcome o;
    struct Row {
        int m;
        GammaDescriptor g;
        bool fixed;
        double b;
        LocalModel want;
    };
    auto lm = [](const char* id, const char* gamma, const char* g0, const char* topo, int p) {
        LocalModel m;
        m.case_id = id;
        m.gamma = gamma;
        m.g_infty0 = g0;
        m.local_topology = topo;
        m.p = p;
        return m;
    };
    const std::vector<Row> rows = {
        {1, {GammaKind::Trivial, 1}, false, 1.0, lm("1i", "trivial", "R2_loc", "open_interval", 0)},
        {1, {GammaKind::Z2ThetaU, 2}, false, 1.0, lm("1ii", "Z2_theta_u", "R2_loc", "open_interval", 0)},
        {1, {GammaKind::Z2RU, 2}, false, 1.0, lm("1iii", "Z2_r_u", "R2_loc", "half_interval", 0)},
        {1, {GammaKind::Z2RTheta, 2}, false, 1.0, lm("1iv", "Z2_r_theta", "R2_loc", "half_interval", 0)},
        {2, {GammaKind::SO2, 1}, true, 1.0, lm("2ai", "SO2", "R1_loc x SO(2)", "half_interval", 0)},
        {2, {GammaKind::O2, 1}, true, 1.0, lm("2aii", "O2", "R1_loc x SO(2)", "half_interval", 0)},
        {2, {GammaKind::Zp, 5}, false, 0.0, lm("2bi", "Zp(5)", "R_loc", "disk_mod_Zp", 5)},
        {2, {GammaKind::D2p, 3}, false, 0.0, lm("2bii", "D2p(3)", "R_loc", "disk_mod_D2p", 3)},
    };
    int matched = 0;
    for (const auto& r : rows) {
        const auto got = classify_local_model(r.m, r.g, 0.5, r.b, r.fixed);
        if (got == r.want)
            ++matched;
        else
            o.expect(false, "row " + r.want.case_id + " got " + got.case_id + "/" + got.gamma + "/" +
                                got.g_infty0 + "/" + got.local_topology);
    }
    const auto c0 = classify_local_model(0, {}, 0.0, 1.0, false);
    const auto c3 = classify_local_model(3, {}, 0.0, 1.0, false);
    o.expect(c0.excluded && c0.exclusion == "Case 0 cannot occur because of the unbounded diameters assumption",
             "m = 0 exclusion");
    o.expect(c3.excluded && c3.exclusion == "Case 3 cannot occur", "m = 3 exclusion");

    const OrbifoldPoint smooth{0, 0.0, 1, false}, cone2{0, 0.0, 2, false}, cone3{40, 2.0, 3, false};
    const auto e1 = detect_singular_points({smooth, {1, 0.5, 1, false}}, 0.1);
    const auto e2 = detect_singular_points({cone2, smooth}, 0.1);
    const auto e3 = detect_singular_points({cone2, cone3}, 0.1);
    o.expect(e1.singular.empty() && !e1.rule_violation, "smooth case");
    o.expect(e2.singular.size() == 1 && !e2.rule_violation, "one cone point");
    o.expect(e3.singular.size() == 2 && e3.rule_violation, "two cone points");
    o.note(std::to_string(matched) + "/8 rows, exclusions and singular cases checked");
    return o;
}

// ---- 9, 10 -----------------------------------------------------------------

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("rflab_acceptance_" + name);
    fs::remove_all(p);
    return p;
}

Outcome end_to_end() {
    Outcome o;
    const auto out = scratch("type2b");
    try {
        cli::run("pipeline", "type2b", nlohmann::json::object(), out, 0);
    } catch (const std::exception& e) {
        o.note(e.what());
    }
    if (!fs::exists(out / "cigar_report.json")) {
        o.expect(false, "no cigar report");
        return o;
    }
    const auto rep = io::read_json(out / "cigar_report.json");
    const double dev = rep.at("deviation").get<double>();
    o.expect(dev < 0.05, "deviation " + fmt(dev));
    o.note("deviation " + fmt(dev));
    fs::remove_all(out);
    return o;
}

Outcome determinism() {
    Outcome o;
    const auto a = scratch("det_a"), b = scratch("det_b");
    cli::run("pipeline", "type2b", nlohmann::json::object(), a, 7);
    cli::run("pipeline", "type2b", nlohmann::json::object(), b, 7);
    const auto ma = io::read_json(a / "manifest.json"), mb = io::read_json(b / "manifest.json");
    o.expect(ma == mb, "manifests differ");
    std::size_t files = 0;
    for (const auto& e : ma.at("files")) {
        const std::string path = e.at("path");
        o.expect(io::sha256_file(a / path) == io::sha256_file(b / path), "hash differs: " + path);
        ++files;
    }
    o.expect(files > 0, "empty manifest");
    o.note(std::to_string(files) + " artifacts hash-identical");
    fs::remove_all(a);
    fs::remove_all(b);
    return o;
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double budget_s;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> all = {
        {1, "curvature kernels", 1.0, curvature_kernels},
        {2, "flow correctness", 10.0, flow_correctness},
        {3, "cigar steadiness", 30.0, cigar_steadiness},
        {4, "pinching suite", 60.0, pinching_suite},
        {5, "dilation", 60.0, dilation},
        {6, "collapse and GH", 120.0, collapse_gh},
        {7, "gluing", 60.0, gluing},
        {8, "classification", 60.0, classification},
        {9, "end-to-end pipeline", 300.0, end_to_end},
        {10, "determinism", 600.0, determinism},
    };
    int failed = 0;
    for (const auto& c : all) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.expect(false, std::string("exception: ") + e.what());
        }
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        o.expect(s < c.budget_s, "runtime " + fmt(s) + " s over " + fmt(c.budget_s) + " s");
        if (!o.pass) ++failed;
        std::printf("%s criterion %d (%s): %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
                    o.detail.c_str(), s);
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}

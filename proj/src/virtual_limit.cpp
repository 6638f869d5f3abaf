#include "rflab/virtual_limit.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include "rflab/curvature.hpp"
#include "rflab/error.hpp"
#include "rflab/interp.hpp"

namespace rflab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> folded_f(const RadialProfile& p) {
    std::vector<double> F(p.f().begin(), p.f().end());
    for (double& v : F) v *= p.theta_period();
    return F;
}

struct Mismatch {
    double mean_sq = kInf;
    double max_abs = kInf;
    double length = 0.0;
};

Mismatch mismatch_at(const RadialProfile& left, const std::vector<double>& FL,
                     const RadialProfile& right, const std::vector<double>& FR, double r0) {
    const double lo = left.r().front(), hi = left.r().back();
    const double slack = 1e-9 * left.h();
    Mismatch m{0.0, 0.0, 0.0};
    std::size_t count = 0;
    double first = kInf, last = -kInf;
    for (std::size_t j = 0; j < right.size(); ++j) {
        const double x = right.r()[j] + r0;
        if (x < lo - slack || x > hi + slack) continue;
        const double df = cubic_uniform(lo, left.h(), FL, x) - FR[j];
        const double dp = cubic_uniform(lo, left.h(), left.phi(), x) - right.phi()[j];
        m.mean_sq += df * df + dp * dp;
        m.max_abs = std::max({m.max_abs, std::abs(df), std::abs(dp)});
        first = std::min(first, right.r()[j]);
        last = std::max(last, right.r()[j]);
        ++count;
    }
    if (count < 3) return {};
    m.mean_sq /= static_cast<double>(count);
    m.length = last - first;
    return m;
}

}  // namespace

OverlapFit overlap_identify(const RadialProfile& left, const RadialProfile& right,
                            const ShiftRange& search, double tolerance) {
    require(search.hi >= search.lo, ErrorCode::InvalidArgument, "empty shift range");
    require(tolerance > 0.0, ErrorCode::InvalidArgument, "tolerance must be positive");
    const auto FL = folded_f(left);
    const auto FR = folded_f(right);
    const double h = std::min(left.h(), right.h());
    const double step = h / 16.0;
    const auto n = static_cast<std::size_t>(std::floor((search.hi - search.lo) / step + 1e-9)) + 1;
    const double mid = 0.5 * (search.lo + search.hi);

    std::vector<double> cost(n, kInf);
    std::vector<double> shift(n);
    std::size_t best = n;
    for (std::size_t k = 0; k < n; ++k) {
        shift[k] = search.lo + step * static_cast<double>(k);
        const Mismatch m = mismatch_at(left, FL, right, FR, shift[k]);
        if (m.length < 2.0 * h * (1.0 - 1e-9)) continue;
        cost[k] = m.mean_sq;
        if (best == n || cost[k] < cost[best] ||
            (cost[k] == cost[best] && std::abs(shift[k] - mid) < std::abs(shift[best] - mid)))
            best = k;
    }
    require(best < n, ErrorCode::NoOverlap, "profiles do not overlap on the search range");

    double r0 = shift[best];
    // parabolic polish through the neighbouring costs
    if (best > 0 && best + 1 < n && std::isfinite(cost[best - 1]) && std::isfinite(cost[best + 1])) {
        const double c0 = cost[best - 1], c1 = cost[best], c2 = cost[best + 1];
        const double denom = c0 - 2.0 * c1 + c2;
        if (denom > 0.0) {
            const double r1 = r0 + std::clamp(0.5 * (c0 - c2) / denom, -0.5, 0.5) * step;
            if (mismatch_at(left, FL, right, FR, r1).mean_sq <= c1) r0 = r1;
        }
    }

    const Mismatch fin = mismatch_at(left, FL, right, FR, r0);
    OverlapFit fit{r0, left.theta_period() / right.theta_period(), fin.max_abs, fin.length};
    require(fit.residual <= 10.0 * tolerance, ErrorCode::NoOverlap,
            "best overlap residual " + std::to_string(fit.residual) + " exceeds tolerance");
    return fit;
}

std::vector<ProfileWindow> cut_windows(const RadialProfile& p, double unit) {
    require(unit > 0.0, ErrorCode::InvalidArgument, "unit must be positive");
    const double start = p.r().front();
    const double length = p.r().back() - start;
    const double slack = 1e-9 * p.h();
    std::vector<ProfileWindow> out;
    std::size_t covered = 0;  // one past the last index already in a window
    for (std::size_t k = 0;; ++k) {
        const double c = 4.0 * unit * static_cast<double>(k);
        const double lo = k == 0 ? 0.0 : c - 3.0 * unit;
        const double hi = c + 3.0 * unit;
        if (lo >= length) break;
        std::size_t j0 = p.size(), j1 = 0;
        for (std::size_t j = 0; j < p.size(); ++j) {
            const double x = p.r()[j] - start;
            const bool inside = (k == 0 ? x >= -slack : x > lo + slack) && x < hi - slack;
            if (!inside) continue;
            j0 = std::min(j0, j);
            j1 = j;
        }
        if (j0 == p.size() || j1 - j0 + 1 < 5 || j1 < covered) continue;
        covered = j1 + 1;

        const std::size_t m = j1 - j0 + 1;
        auto r = uniform_grid(p.r()[j0] - start - c, p.r()[j1] - start - c, m);
        std::vector<double> phi(p.phi().begin() + j0, p.phi().begin() + j1 + 1);
        std::vector<double> f(p.f().begin() + j0, p.f().begin() + j1 + 1);
        auto o = p.options();
        o.closed_tip = p.closed_tip() && j0 == 0;
        o.closed_end = p.closed_end() && j1 == p.size() - 1;
        if (!o.closed_tip) o.cone_order = 1;
        out.push_back({RadialProfile(std::move(r), std::move(phi), std::move(f), o), start + c,
                       std::nullopt, std::nullopt});
    }
    return out;
}

namespace {

// C-infinity step from 0 on (-inf, 0] to 1 on [1, inf)
double smooth_step(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / t);
    const double b = std::exp(-1.0 / (1.0 - t));
    return a / (a + b);
}

}  // namespace

GlueResult glue(std::vector<ProfileWindow> windows, const GlueOptions& opts) {
    require(!windows.empty(), ErrorCode::InvalidArgument, "no windows to glue");

    std::size_t first = 0, last = windows.size() - 1;
    for (std::size_t k = 1; k < windows.size(); ++k)
        if (windows[k].profile.closed_tip()) first = k;
    for (std::size_t k = first; k < windows.size(); ++k)
        if (windows[k].profile.closed_end()) {
            last = k;
            break;
        }
    require(!(windows[first].profile.closed_tip() && windows[last].profile.closed_end()),
            ErrorCode::TwoClosedEnds, "both ends of the chain close up");
    windows = std::vector<ProfileWindow>(windows.begin() + static_cast<std::ptrdiff_t>(first),
                                         windows.begin() + static_cast<std::ptrdiff_t>(last) + 1);

    const std::size_t nw = windows.size();
    std::vector<double> offset(nw, windows.front().center_r);
    double max_residual = 0.0;
    for (std::size_t k = 0; k + 1 < nw; ++k) {
        const double nominal = windows[k + 1].center_r - windows[k].center_r;
        const OverlapFit fit = overlap_identify(
            windows[k].profile, windows[k + 1].profile,
            {nominal - opts.search_half_width, nominal + opts.search_half_width},
            opts.overlap_tolerance);
        require(fit.residual <= opts.seam_tolerance, ErrorCode::SeamMismatch,
                "seam residual " + std::to_string(fit.residual) + " between windows " +
                    std::to_string(k) + " and " + std::to_string(k + 1));
        windows[k].overlap_right = fit;
        windows[k + 1].overlap_left = fit;
        offset[k + 1] = offset[k] + fit.r0;
        max_residual = std::max(max_residual, fit.residual);
    }

    std::vector<double> lo(nw), hi(nw), h(nw);
    std::vector<std::vector<double>> F(nw);
    double hmin = kInf;
    for (std::size_t k = 0; k < nw; ++k) {
        const auto& p = windows[k].profile;
        lo[k] = offset[k] + p.r().front();
        hi[k] = offset[k] + p.r().back();
        h[k] = p.h();
        F[k] = folded_f(p);
        hmin = std::min(hmin, p.h());
        require(k == 0 || (lo[k] > lo[k - 1] && hi[k] > hi[k - 1]), ErrorCode::SeamMismatch,
                "windows do not advance along the chain");
    }

    const double a = lo.front(), b = hi.back();
    const auto n = static_cast<std::size_t>(std::llround((b - a) / hmin)) + 1;
    auto r = uniform_grid(a, b, n);
    std::vector<double> phi(n), f(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double x = r[j];
        bool have = false;
        double vf = 0.0, vp = 0.0;
        for (std::size_t k = 0; k < nw; ++k) {
            const double slack = 1e-9 * h[k];
            if (x < lo[k] - slack || x > hi[k] + slack) continue;
            const auto& p = windows[k].profile;
            const double local = x - offset[k];
            const double wf = cubic_uniform(p.r().front(), p.h(), F[k], local);
            const double wp = cubic_uniform(p.r().front(), p.h(), p.phi(), local);
            if (!have) {
                vf = wf, vp = wp, have = true;
                continue;
            }
            const double s = smooth_step((x - lo[k]) / (hi[k - 1] - lo[k]));
            vf = (1.0 - s) * vf + s * wf;
            vp = (1.0 - s) * vp + s * wp;
        }
        require(have, ErrorCode::SeamMismatch, "gap between windows");
        f[j] = vf;
        phi[j] = vp;
    }

    RadialProfile::Options o;
    o.closed_tip = windows.front().profile.closed_tip();
    o.closed_end = windows.back().profile.closed_end();
    o.time_stamp = windows.front().profile.time_stamp();
    o.theta_period = 1.0;
    // closure is judged by extend_to_disk
    o.tip_tolerance = 1e9;
    if (o.closed_tip) f.front() = 0.0;
    if (o.closed_end) f.back() = 0.0;
    return {RadialProfile(std::move(r), std::move(phi), std::move(f), o), std::move(windows),
            max_residual};
}

RadialProfile extend_to_disk(const RadialProfile& p, double tolerance) {
    require(p.closed_tip() != p.closed_end(), ErrorCode::InvalidArgument,
            "f must vanish at exactly one end");
    std::vector<double> phi(p.phi().begin(), p.phi().end());
    std::vector<double> f(p.f().begin(), p.f().end());
    if (p.closed_end()) {
        std::reverse(phi.begin(), phi.end());
        std::reverse(f.begin(), f.end());
    }
    const double h = p.h();
    const double ratio = (8.0 * f[1] - f[2]) / (6.0 * h) / phi[0];
    require(std::isfinite(ratio) && ratio > 0.0, ErrorCode::ClosureFailure,
            "f does not increase away from the tip");

    int order = 0;
    if (std::abs(ratio - 1.0) < tolerance) {
        order = 1;
    } else {
        double best = kInf;
        for (int q = 2; q <= kMaxConeOrder; ++q) {
            const double d = std::abs(ratio - 1.0 / q);
            if (d < tolerance && d < best) best = d, order = q;
        }
    }
    require(order > 0, ErrorCode::ClosureFailure,
            "f'(0)/phi(0) = " + std::to_string(ratio) + " matches no cone angle");

    const double c = 1.0 / (static_cast<double>(order) * ratio);
    for (double& v : f) v *= c;
    RadialProfile::Options o;
    o.closed_tip = true;
    o.cone_order = order;
    o.time_stamp = p.time_stamp();
    o.theta_period = p.theta_period() / c;
    return RadialProfile(uniform_grid(0.0, h * static_cast<double>(p.size() - 1), p.size()),
                         std::move(phi), std::move(f), o);
}

std::optional<GammaDescriptor> parse_gamma(const std::string& s, int p) {
    auto with_order = [&](const std::string& prefix, GammaKind kind) -> std::optional<GammaDescriptor> {
        if (s == prefix) return GammaDescriptor{kind, p};
        if (s.size() > prefix.size() + 2 && s.compare(0, prefix.size() + 1, prefix + "(") == 0 &&
            s.back() == ')') {
            int q = 0;
            const char* b = s.data() + prefix.size() + 1;
            const char* e = s.data() + s.size() - 1;
            auto [ptr, ec] = std::from_chars(b, e, q);
            if (ec == std::errc() && ptr == e) return GammaDescriptor{kind, q};
        }
        return std::nullopt;
    };
    if (s == "trivial") return GammaDescriptor{GammaKind::Trivial, 1};
    if (s == "Z2_theta_u") return GammaDescriptor{GammaKind::Z2ThetaU, 2};
    if (s == "Z2_r_u") return GammaDescriptor{GammaKind::Z2RU, 2};
    if (s == "Z2_r_theta") return GammaDescriptor{GammaKind::Z2RTheta, 2};
    if (s == "SO2") return GammaDescriptor{GammaKind::SO2, 1};
    if (s == "O2") return GammaDescriptor{GammaKind::O2, 1};
    if (auto g = with_order("Zp", GammaKind::Zp)) return g;
    if (auto g = with_order("D2p", GammaKind::D2p)) return g;
    return std::nullopt;
}

std::string to_string(const GammaDescriptor& g) {
    switch (g.kind) {
        case GammaKind::Trivial: return "trivial";
        case GammaKind::Z2ThetaU: return "Z2_theta_u";
        case GammaKind::Z2RU: return "Z2_r_u";
        case GammaKind::Z2RTheta: return "Z2_r_theta";
        case GammaKind::SO2: return "SO2";
        case GammaKind::O2: return "O2";
        case GammaKind::Zp: return "Zp(" + std::to_string(g.p) + ")";
        case GammaKind::D2p: return "D2p(" + std::to_string(g.p) + ")";
    }
    return "unknown";
}

LocalModel classify_local_model(int m, const GammaDescriptor& gamma, double a, double b,
                                bool has_fixed_point) {
    (void)a;
    if (m == 0)
        return {true, "Case 0 cannot occur because of the unbounded diameters assumption",
                "0", "", "", "", 0};
    if (m == 3) return {true, "Case 3 cannot occur", "3", "", "", "", 0};
    require(m == 1 || m == 2, ErrorCode::InconsistentInput, "m must lie in {0, 1, 2, 3}");

    const std::string g = to_string(gamma);
    if (m == 1) {
        require(!has_fixed_point, ErrorCode::InconsistentInput,
                "m = 1 models have no rotation fixed point");
        switch (gamma.kind) {
            case GammaKind::Trivial: return {false, "", "1i", g, "R2_loc", "open_interval", 0};
            case GammaKind::Z2ThetaU: return {false, "", "1ii", g, "R2_loc", "open_interval", 0};
            case GammaKind::Z2RU: return {false, "", "1iii", g, "R2_loc", "half_interval", 0};
            case GammaKind::Z2RTheta: return {false, "", "1iv", g, "R2_loc", "half_interval", 0};
            default: break;
        }
        throw Error(ErrorCode::InconsistentInput, "gamma " + g + " does not occur with m = 1");
    }

    switch (gamma.kind) {
        case GammaKind::SO2:
        case GammaKind::O2: {
            require(has_fixed_point, ErrorCode::InconsistentInput,
                    "2a models need a rotation fixed point");
            require(b != 0.0, ErrorCode::InconsistentInput, "2a models need b != 0");
            const bool so = gamma.kind == GammaKind::SO2;
            return {false, "", so ? "2ai" : "2aii", g, "R1_loc x SO(2)", "half_interval", 0};
        }
        case GammaKind::Zp:
        case GammaKind::D2p: {
            require(gamma.p >= 1, ErrorCode::InconsistentInput, "group order must be positive");
            const bool cyc = gamma.kind == GammaKind::Zp;
            return {false, "", cyc ? "2bi" : "2bii", g, "R_loc",
                    cyc ? "disk_mod_Zp" : "disk_mod_D2p", gamma.p};
        }
        default: break;
    }
    throw Error(ErrorCode::InconsistentInput, "gamma " + g + " does not occur with m = 2");
}

SingularReport detect_singular_points(const std::vector<OrbifoldPoint>& points, double min_K) {
    SingularReport rep;
    for (const auto& p : points)
        if (p.cone_order > 1 || p.dihedral) rep.singular.push_back(p);
    if (rep.singular.size() > 1 && min_K > 0.0) {
        rep.rule_violation = true;
        rep.diagnostic = std::to_string(rep.singular.size()) +
                         " singular points with positive curvature: at most one is possible, "
                         "input data are inconsistent";
    }
    return rep;
}

namespace {

struct Slice {
    double k_tip = 0.0;
    double sup_k = 0.0;
    double deviation = 0.0;
    double sigma = 0.0;
    std::vector<std::pair<double, double>> curve;
};

Slice compare_one(const RadialProfile& p, const CigarOptions& opts) {
    require(p.closed_tip(), ErrorCode::InvalidArgument, "cigar comparison needs a closed tip");
    require(p.size() > opts.trim_end + 2, ErrorCode::GridTooSmall, "profile shorter than the trim");
    const auto K = gauss_curvature(p);
    const auto s = arclength(p);
    const std::size_t end = p.size() - opts.trim_end;
    Slice out;
    out.k_tip = K[0];
    require(out.k_tip > 0.0, ErrorCode::NotPositive, "tip curvature is not positive");
    out.sigma = std::sqrt(0.5 * out.k_tip);
    for (std::size_t j = 0; j < end; ++j) {
        if (opts.s_max > 0.0 && s[j] > opts.s_max) break;
        require(K[j] > 0.0, ErrorCode::NotPositive,
                "curvature not positive at s = " + std::to_string(s[j]));
        const double c = 1.0 / std::cosh(out.sigma * s[j]);
        const double ratio = K[j] / out.k_tip;
        out.deviation = std::max(out.deviation, std::abs(ratio - c * c));
        out.sup_k = std::max(out.sup_k, K[j]);
        out.curve.emplace_back(s[j], ratio);
    }
    return out;
}

}  // namespace

CigarReport cigar_compare(const SurfaceSolution& sol, const CigarOptions& opts) {
    require(sol.size() > 0, ErrorCode::InvalidArgument, "empty solution");
    CigarReport rep;
    Slice first;
    for (std::size_t i = 0; i < sol.size(); ++i) {
        Slice sl = compare_one(sol[i], opts);
        if (i == 0) first = sl;
        rep.deviation = std::max(rep.deviation, sl.deviation);
        rep.k_tip_drift = std::max(rep.k_tip_drift, std::abs(sl.k_tip / first.k_tip - 1.0));
        rep.sup_scalar_drift = std::max(rep.sup_scalar_drift, std::abs(sl.sup_k / first.sup_k - 1.0));
        if (i + 1 == sol.size()) {
            rep.final_deviation = sl.deviation;
            rep.sigma = sl.sigma;
            rep.curve = std::move(sl.curve);
        }
    }
    return rep;
}

CigarReport cigar_compare(const RadialProfile& p, const CigarOptions& opts) {
    return cigar_compare(SurfaceSolution({p}), opts);
}

}  // namespace rflab

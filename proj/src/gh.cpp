#include "rflab/gh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "rflab/error.hpp"

namespace rflab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Pair {
    std::size_t a, b;
};

// Max |dA(a, x) - dB(b, y)| over the pairs (x, y) in ps.
double pair_cost(const FiniteMetricSpace& A, const FiniteMetricSpace& B, std::size_t a,
                 std::size_t b, const std::vector<Pair>& ps, double cap = kInf) {
    double m = 0.0;
    auto ra = A.row(a);
    auto rb = B.row(b);
    for (const auto& p : ps) {
        m = std::max(m, std::abs(ra[p.a] - rb[p.b]));
        if (m >= cap) break;
    }
    return m;
}

class ExactSearch {
public:
    ExactSearch(const FiniteMetricSpace& A, const FiniteMetricSpace& B, GhMode mode)
        : A_(A), B_(B), pointed_(mode == GhMode::Pointed) {}

    double run() {
        if (pointed_) pairs_.push_back({A_.base(), B_.base()});
        best_ = initial_bound();
        descend(0, 0.0);
        return 0.5 * best_;
    }

private:
    // distortion of the trivial "everything to base" correspondence
    double initial_bound() const {
        return std::max(A_.diameter(), B_.diameter());
    }

    // Steps 0..|A|-1 choose f(a); the rest choose g(b).
    void descend(std::size_t step, double current) {
        if (current >= best_) return;
        const std::size_t na = A_.size(), nb = B_.size();
        if (step == na + nb) {
            best_ = current;
            return;
        }
        if (step < na) {
            const std::size_t a = step;
            if (pointed_ && a == A_.base()) return descend(step + 1, current);
            for (std::size_t b = 0; b < nb; ++b) try_pair({a, b}, step, current);
        } else {
            const std::size_t b = step - na;
            if (pointed_ && b == B_.base()) return descend(step + 1, current);
            // already covered by some f(a) = b: that pair suffices
            for (const auto& p : pairs_)
                if (p.b == b) return descend(step + 1, current);
            for (std::size_t a = 0; a < na; ++a) try_pair({a, b}, step, current);
        }
    }

    void try_pair(Pair p, std::size_t step, double current) {
        const double c = std::max(current, pair_cost(A_, B_, p.a, p.b, pairs_, best_));
        if (c >= best_) return;
        pairs_.push_back(p);
        descend(step + 1, c);
        pairs_.pop_back();
    }

    const FiniteMetricSpace& A_;
    const FiniteMetricSpace& B_;
    bool pointed_;
    std::vector<Pair> pairs_;
    double best_ = kInf;
};

double hausdorff_1d(std::vector<double> x, std::vector<double> y) {
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    auto directed = [](const std::vector<double>& p, const std::vector<double>& q) {
        double worst = 0.0;
        for (double v : p) {
            auto it = std::lower_bound(q.begin(), q.end(), v);
            double d = kInf;
            if (it != q.end()) d = std::min(d, *it - v);
            if (it != q.begin()) d = std::min(d, v - *(it - 1));
            worst = std::max(worst, d);
        }
        return worst;
    };
    return std::max(directed(x, y), directed(y, x));
}

std::vector<double> eccentricities(const FiniteMetricSpace& X) {
    std::vector<double> e(X.size());
    for (std::size_t i = 0; i < X.size(); ++i) {
        auto r = X.row(i);
        e[i] = *std::max_element(r.begin(), r.end());
    }
    return e;
}

double lower_bound(const FiniteMetricSpace& A, const FiniteMetricSpace& B, GhMode mode) {
    double lo = 0.5 * std::abs(A.diameter() - B.diameter());
    lo = std::max(lo, 0.5 * hausdorff_1d(eccentricities(A), eccentricities(B)));
    if (mode == GhMode::Pointed) {
        auto ra = A.row(A.base());
        auto rb = B.row(B.base());
        lo = std::max(lo, 0.5 * hausdorff_1d({ra.begin(), ra.end()}, {rb.begin(), rb.end()}));
    }
    return lo;
}

struct Correspondence {
    std::vector<std::size_t> f, g;
    double dis = kInf;
};

std::vector<Pair> pairs_of(const Correspondence& c) {
    std::vector<Pair> ps;
    for (std::size_t a = 0; a < c.f.size(); ++a) ps.push_back({a, c.f[a]});
    for (std::size_t b = 0; b < c.g.size(); ++b) ps.push_back({c.g[b], b});
    return ps;
}

// One restart: greedy assignment in the given order, then coordinate descent
// where each element is re-paired against all other pairs.
Correspondence greedy_restart(const FiniteMetricSpace& A, const FiniteMetricSpace& B,
                              bool pointed, std::mt19937_64& rng, bool sorted_order) {
    const std::size_t na = A.size(), nb = B.size();
    constexpr std::size_t kUnset = std::numeric_limits<std::size_t>::max();
    Correspondence c{std::vector<std::size_t>(na, kUnset), std::vector<std::size_t>(nb, kUnset)};
    std::vector<Pair> ps;

    std::size_t a0 = A.base(), b0 = B.base();
    if (!pointed) {
        a0 = std::uniform_int_distribution<std::size_t>(0, na - 1)(rng);
        b0 = std::uniform_int_distribution<std::size_t>(0, nb - 1)(rng);
    }
    c.f[a0] = b0;
    c.g[b0] = a0;
    ps.push_back({a0, b0});

    // elements tagged: < na is a point of A, otherwise of B
    std::vector<std::size_t> order;
    for (std::size_t a = 0; a < na; ++a)
        if (a != a0) order.push_back(a);
    for (std::size_t b = 0; b < nb; ++b)
        if (b != b0) order.push_back(na + b);
    if (sorted_order) {
        auto key = [&](std::size_t e) { return e < na ? A(a0, e) : B(b0, e - na); };
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t x, std::size_t y) { return key(x) < key(y); });
    } else {
        std::shuffle(order.begin(), order.end(), rng);
    }

    auto best_partner_of_a = [&](std::size_t a, const std::vector<Pair>& cur) {
        std::size_t arg = 0;
        double best = kInf;
        for (std::size_t b = 0; b < nb; ++b) {
            const double v = pair_cost(A, B, a, b, cur, best);
            if (v < best) best = v, arg = b;
        }
        return std::pair{arg, best};
    };
    auto best_partner_of_b = [&](std::size_t b, const std::vector<Pair>& cur) {
        std::size_t arg = 0;
        double best = kInf;
        for (std::size_t a = 0; a < na; ++a) {
            const double v = pair_cost(A, B, a, b, cur, best);
            if (v < best) best = v, arg = a;
        }
        return std::pair{arg, best};
    };

    for (std::size_t e : order) {
        if (e < na) {
            auto [b, v] = best_partner_of_a(e, ps);
            c.f[e] = b;
            ps.push_back({e, b});
        } else {
            const std::size_t b = e - na;
            auto [a, v] = best_partner_of_b(b, ps);
            c.g[b] = a;
            ps.push_back({a, b});
        }
    }

    // local refinement
    for (int round = 0; round < 8; ++round) {
        bool changed = false;
        for (std::size_t a = 0; a < na; ++a) {
            if (pointed && a == a0) continue;
            auto others = pairs_of(c);
            others.erase(others.begin() + static_cast<std::ptrdiff_t>(a));
            const double cur = pair_cost(A, B, a, c.f[a], others);
            auto [b, v] = best_partner_of_a(a, others);
            if (v < cur) {
                c.f[a] = b;
                changed = true;
            }
        }
        for (std::size_t b = 0; b < nb; ++b) {
            if (pointed && b == b0) continue;
            auto others = pairs_of(c);
            others.erase(others.begin() + static_cast<std::ptrdiff_t>(na + b));
            const double cur = pair_cost(A, B, c.g[b], b, others);
            auto [a, v] = best_partner_of_b(b, others);
            if (v < cur) {
                c.g[b] = a;
                changed = true;
            }
        }
        if (!changed) break;
    }
    c.dis = distortion(A, B, c.f, c.g);
    return c;
}

bool better(const Correspondence& x, std::size_t xi, const Correspondence& y, std::size_t yi) {
    if (x.dis != y.dis) return x.dis < y.dis;
    return xi < yi;
}

GhBounds finish(const FiniteMetricSpace& A, const FiniteMetricSpace& B, GhMode mode,
                Correspondence best) {
    GhBounds out;
    out.lower = lower_bound(A, B, mode);
    out.upper = 0.5 * best.dis;
    out.f = std::move(best.f);
    out.g = std::move(best.g);
    return out;
}

}  // namespace

double distortion(const FiniteMetricSpace& A, const FiniteMetricSpace& B,
                  const std::vector<std::size_t>& f, const std::vector<std::size_t>& g) {
    Correspondence c{f, g};
    auto ps = pairs_of(c);
    double m = 0.0;
    for (std::size_t i = 0; i < ps.size(); ++i)
        for (std::size_t j = i + 1; j < ps.size(); ++j)
            m = std::max(m, std::abs(A(ps[i].a, ps[j].a) - B(ps[i].b, ps[j].b)));
    return m;
}

double gh_exact(const FiniteMetricSpace& A, const FiniteMetricSpace& B, GhMode mode,
                std::size_t limit) {
    limit = std::min(limit, kExactGhLimit);
    require(A.size() <= limit && B.size() <= limit, ErrorCode::TooLarge,
            "exact GH limited to " + std::to_string(limit) + "-point spaces");
    return ExactSearch(A, B, mode).run();
}

GhBounds gh_bound_serial(const FiniteMetricSpace& A, const FiniteMetricSpace& B,
                         std::size_t iterations, std::uint64_t seed, GhMode mode) {
    const bool pointed = mode == GhMode::Pointed;
    const std::size_t runs = std::max<std::size_t>(1, iterations);
    Correspondence best;
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < runs; ++i) {
        std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ULL * (i + 1));
        auto c = greedy_restart(A, B, pointed, rng, i == 0);
        if (i == 0 || better(c, i, best, best_i)) best = std::move(c), best_i = i;
    }
    return finish(A, B, mode, std::move(best));
}

GhBounds gh_bound(const FiniteMetricSpace& A, const FiniteMetricSpace& B, std::size_t iterations,
                  std::uint64_t seed, GhMode mode) {
    const bool pointed = mode == GhMode::Pointed;
    const auto runs = static_cast<std::ptrdiff_t>(std::max<std::size_t>(1, iterations));
    std::vector<Correspondence> results(static_cast<std::size_t>(runs));
#pragma omp parallel for schedule(dynamic) if (runs > 1)
    for (std::ptrdiff_t i = 0; i < runs; ++i) {
        std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(i + 1));
        results[static_cast<std::size_t>(i)] = greedy_restart(A, B, pointed, rng, i == 0);
    }
    std::size_t best_i = 0;
    for (std::size_t i = 1; i < results.size(); ++i)
        if (better(results[i], i, results[best_i], best_i)) best_i = i;
    return finish(A, B, mode, std::move(results[best_i]));
}

namespace {

double percentile(const std::vector<double>& sorted, double q) {
    const double pos = q / 100.0 * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double w = pos - static_cast<double>(lo);
    return (1.0 - w) * sorted[lo] + w * sorted[hi];
}

}  // namespace

DimensionEstimate dim_estimate(const FiniteMetricSpace& A, const DimensionOptions& opts) {
    require(opts.lo_percentile > 0.0 && opts.hi_percentile <= 100.0 &&
                opts.lo_percentile < opts.hi_percentile && opts.scales >= 3,
            ErrorCode::InvalidArgument, "bad dimension window");
    DimensionEstimate est;
    const std::size_t n = A.size();
    if (n == 1) return est;

    std::vector<double> d;
    d.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (A(i, j) > 0.0) d.push_back(A(i, j));
    require(!d.empty(), ErrorCode::DegenerateScales, "all points coincide");
    std::sort(d.begin(), d.end());
    est.r_min = percentile(d, opts.lo_percentile);
    est.r_max = percentile(d, opts.hi_percentile);
    require(est.r_min > 0.0 && est.r_max > est.r_min * (1.0 + 1e-9), ErrorCode::DegenerateScales,
            "distance distribution spans no scale range");

    const double pairs = static_cast<double>(n * (n - 1) / 2);
    std::vector<double> lx, ly;
    double last = -1.0;
    for (std::size_t k = 0; k < opts.scales; ++k) {
        const double u = static_cast<double>(k) / static_cast<double>(opts.scales - 1);
        const double r = est.r_min * std::pow(est.r_max / est.r_min, u);
        const auto cnt = static_cast<double>(std::upper_bound(d.begin(), d.end(), r) - d.begin());
        if (cnt <= 0.0 || cnt == last) continue;
        last = cnt;
        lx.push_back(std::log(r));
        ly.push_back(std::log(cnt / pairs));
    }
    require(lx.size() >= 3, ErrorCode::DegenerateScales, "fewer than 3 usable scales");
    est.scales_used = lx.size();

    const double m = static_cast<double>(lx.size());
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / m;
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / m;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < lx.size(); ++k) {
        sxx += (lx[k] - mx) * (lx[k] - mx);
        sxy += (lx[k] - mx) * (ly[k] - my);
    }
    est.dimension = sxy / sxx;
    double ss = 0.0;
    for (std::size_t k = 0; k < lx.size(); ++k) {
        const double e = ly[k] - (my + est.dimension * (lx[k] - mx));
        ss += e * e;
    }
    est.residual = std::sqrt(ss / m);
    return est;
}

}  // namespace rflab

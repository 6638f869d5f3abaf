#include "rflab/collapse.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <random>

#include "rflab/error.hpp"
#include "rflab/interp.hpp"
#include "rflab/parallel.hpp"

namespace rflab {

CollapseFamily make_family(const SurfaceSolution& sol, std::vector<double> epsilons,
                           std::optional<Twist> twist) {
    require(sol.size() > 0, ErrorCode::InvalidArgument, "empty solution");
    require(!epsilons.empty(), ErrorCode::InvalidArgument, "empty epsilon schedule");
    for (std::size_t i = 0; i < epsilons.size(); ++i) {
        require(epsilons[i] > 0.0, ErrorCode::InvalidArgument, "epsilons must be positive");
        require(i == 0 || epsilons[i] < epsilons[i - 1], ErrorCode::InvalidArgument,
                "epsilons must be strictly decreasing");
    }
    if (twist) require(twist->b != 0.0, ErrorCode::ZeroB, "twist b must be nonzero");

    CollapseFamily fam{sol, std::move(epsilons), twist, {}};
    const double a = twist ? twist->a : 0.0;
    const double b = twist ? twist->b : 0.0;
    for (double eps : fam.epsilons) {
        std::vector<Warped3Metric> seq;
        seq.reserve(sol.size());
        for (const auto& p : sol.profiles()) seq.emplace_back(p, eps, a, b);
        fam.members.push_back(std::move(seq));
    }
    return fam;
}

double inj_proxy(const Warped3Metric& m, std::size_t point_index) {
    require(point_index < m.base.size(), ErrorCode::InvalidArgument, "point index out of range");
    const double eps = m.fiber_length;
    if (!m.twisted()) return 0.5 * eps;
    require(m.twist_b != 0.0, ErrorCode::ZeroB, "twist b must be nonzero");
    const double f = m.base.f()[point_index] * m.base.theta_period();
    const double s = m.twist_a * f / m.twist_b;
    return 0.5 * eps * std::sqrt(1.0 + s * s);
}

double halton(std::uint64_t i, unsigned base) {
    double inv = 1.0 / base, scale = inv, x = 0.0;
    while (i > 0) {
        x += static_cast<double>(i % base) * scale;
        i /= base;
        scale *= inv;
    }
    return x;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Offset {
    int di, dk, dl;
};

std::vector<Offset> stencil(bool with_u) {
    static constexpr std::array<std::array<int, 2>, 17> planar{{{0, 0},
                                                                {0, 1},
                                                                {0, -1},
                                                                {1, 0},
                                                                {-1, 0},
                                                                {1, 1},
                                                                {1, -1},
                                                                {-1, 1},
                                                                {-1, -1},
                                                                {1, 2},
                                                                {1, -2},
                                                                {-1, 2},
                                                                {-1, -2},
                                                                {2, 1},
                                                                {2, -1},
                                                                {-2, 1},
                                                                {-2, -1}}};
    std::vector<Offset> out;
    for (auto [di, dk] : planar)
        for (int dl = -1; dl <= 1; ++dl) {
            if (!with_u && dl != 0) continue;
            if (di == 0 && dk == 0 && dl == 0) continue;
            out.push_back({di, dk, dl});
        }
    return out;
}

SamplingWindow clip(const RadialProfile& p, const SamplingWindow& w) {
    const double lo = std::max(w.r_lo, p.r().front());
    const double hi = std::min(w.r_hi, p.r().back());
    require(std::isfinite(lo) && std::isfinite(hi) && hi > lo, ErrorCode::WindowEmpty,
            "sampling window does not meet the profile");
    return {lo, hi};
}

double frac(double x) { return x - std::floor(x); }

double unit_from(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

MetricGraph::MetricGraph(const RadialProfile& base, const SamplingWindow& window,
                         const GraphResolution& res) {
    build(base, window, res, 0.0, 0.0, 0.0);
}

MetricGraph::MetricGraph(const Warped3Metric& m, const SamplingWindow& window,
                         const GraphResolution& res) {
    if (m.twisted()) require(m.twist_b != 0.0, ErrorCode::ZeroB, "twist b must be nonzero");
    build(m.base, window, res, m.fiber_length, m.twist_a, m.twist_b);
}

void MetricGraph::build(const RadialProfile& base, const SamplingWindow& window,
                        const GraphResolution& res, double fiber, double a, double b) {
    require(res.dr > 0.0 && res.n_theta >= 1, ErrorCode::InvalidArgument,
            "bad graph resolution");
    const SamplingWindow w = clip(base, window);
    const auto cells = static_cast<std::size_t>(std::ceil((w.r_hi - w.r_lo) / res.dr - 1e-9));
    nr_ = std::max<std::size_t>(cells, 1) + 1;
    r0_ = w.r_lo;
    dr_ = (w.r_hi - w.r_lo) / static_cast<double>(nr_ - 1);
    nt_ = res.n_theta;
    dtheta_ = kTwoPi * base.theta_period() / static_cast<double>(nt_);
    if (fiber > 0.0) {
        require(res.n_u >= 1, ErrorCode::InvalidArgument, "bad fiber resolution");
        nu_ = res.n_u;
        du_ = fiber / static_cast<double>(nu_);
        if (b != 0.0) wrap_shift_ = static_cast<std::ptrdiff_t>(std::llround(a * fiber / b / dtheta_));
    }

    const std::size_t nh = 2 * nr_ - 1;
    phi_half_.resize(nh);
    f_half_.resize(nh);
    const double x0 = base.r().front();
    for (std::size_t k = 0; k < nh; ++k) {
        const double r = r0_ + 0.5 * dr_ * static_cast<double>(k);
        phi_half_[k] = cubic_uniform(x0, base.h(), base.phi(), r);
        f_half_[k] = std::max(0.0, cubic_uniform(x0, base.h(), base.f(), r));
    }
    // exact zeros at closed ends keep the tip a single point
    if (base.closed_tip() && r0_ == base.r().front()) f_half_.front() = 0.0;
    if (base.closed_end() && w.r_hi == base.r().back()) f_half_.back() = 0.0;
}

std::size_t MetricGraph::nearest_node(const Coord& c) const {
    auto i = static_cast<std::ptrdiff_t>(std::llround((c.r - r0_) / dr_));
    i = std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(nr_) - 1);
    const double circ = dtheta_ * static_cast<double>(nt_);
    auto k = static_cast<std::size_t>(std::llround(frac(c.theta / circ) * static_cast<double>(nt_))) % nt_;
    std::size_t l = 0;
    if (nu_ > 1) {
        const double fib = du_ * static_cast<double>(nu_);
        l = static_cast<std::size_t>(std::llround(frac(c.u / fib) * static_cast<double>(nu_))) % nu_;
    }
    return (static_cast<std::size_t>(i) * nt_ + k) * nu_ + l;
}

Coord MetricGraph::node_coord(std::size_t node) const {
    const std::size_t l = node % nu_;
    const std::size_t k = (node / nu_) % nt_;
    const std::size_t i = node / (nu_ * nt_);
    return {r0_ + dr_ * static_cast<double>(i), dtheta_ * static_cast<double>(k),
            du_ * static_cast<double>(l)};
}

std::vector<double> MetricGraph::distances_from(std::size_t source) const {
    require(source < node_count(), ErrorCode::InvalidArgument, "source out of range");
    const auto offs = stencil(nu_ > 1);
    const auto nr = static_cast<std::ptrdiff_t>(nr_);
    const auto nt = static_cast<std::ptrdiff_t>(nt_);
    const auto nu = static_cast<std::ptrdiff_t>(nu_);

    // edge lengths depend only on the radial index and the offset
    std::vector<double> wt(nr_ * offs.size(), kInf);
    for (std::ptrdiff_t i = 0; i < nr; ++i)
        for (std::size_t o = 0; o < offs.size(); ++o) {
            const auto [di, dk, dl] = offs[o];
            if (i + di < 0 || i + di >= nr) continue;
            const std::size_t mid = static_cast<std::size_t>(2 * i + di);
            const double a = phi_half_[mid] * dr_ * di;
            const double b = f_half_[mid] * dtheta_ * dk;
            const double c = du_ * dl;
            wt[static_cast<std::size_t>(i) * offs.size() + o] = std::sqrt(a * a + b * b + c * c);
        }

    std::vector<double> dist(node_count(), kInf);
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[source] = 0.0;
    pq.push({0.0, source});
    while (!pq.empty()) {
        auto [d, v] = pq.top();
        pq.pop();
        if (d > dist[v]) continue;
        const auto l = static_cast<std::ptrdiff_t>(v % nu_);
        const auto k = static_cast<std::ptrdiff_t>((v / nu_) % nt_);
        const auto i = static_cast<std::ptrdiff_t>(v / (nu_ * nt_));
        const double* wi = wt.data() + static_cast<std::size_t>(i) * offs.size();
        for (std::size_t o = 0; o < offs.size(); ++o) {
            if (wi[o] == kInf) continue;
            const auto [di, dk, dl] = offs[o];
            std::ptrdiff_t kk = k + dk;
            std::ptrdiff_t ll = l + dl;
            if (ll >= nu) {
                ll -= nu;
                kk -= wrap_shift_;
            } else if (ll < 0) {
                ll += nu;
                kk += wrap_shift_;
            }
            kk = ((kk % nt) + nt) % nt;
            const std::size_t w =
                static_cast<std::size_t>(((i + di) * nt + kk) * nu + ll);
            const double nd = d + wi[o];
            if (nd < dist[w]) {
                dist[w] = nd;
                pq.push({nd, w});
            }
        }
    }
    return dist;
}

double MetricGraph::distance(const Coord& a, const Coord& b) const {
    return distances_from(nearest_node(a))[nearest_node(b)];
}

std::vector<std::size_t> MetricGraph::sources_of(const std::vector<Coord>& points) const {
    std::vector<std::size_t> src(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) src[i] = nearest_node(points[i]);
    return src;
}

std::vector<double> MetricGraph::assemble(const std::vector<std::size_t>& src,
                                          const std::vector<std::vector<double>>& rows) const {
    const std::size_t n = src.size();
    std::vector<double> d(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            d[i * n + j] = d[j * n + i] = std::min(rows[i][src[j]], rows[j][src[i]]);
    return d;
}

std::vector<double> MetricGraph::pairwise(const std::vector<Coord>& points) const {
    const auto src = sources_of(points);
    const auto n = static_cast<std::ptrdiff_t>(src.size());
    std::vector<std::vector<double>> rows(src.size());
#pragma omp parallel for schedule(dynamic) if (n >= kParallelSourceThreshold)
    for (std::ptrdiff_t i = 0; i < n; ++i)
        rows[static_cast<std::size_t>(i)] = distances_from(src[static_cast<std::size_t>(i)]);
    return assemble(src, rows);
}

std::vector<double> MetricGraph::pairwise_serial(const std::vector<Coord>& points) const {
    const auto src = sources_of(points);
    std::vector<std::vector<double>> rows;
    rows.reserve(src.size());
    for (std::size_t s : src) rows.push_back(distances_from(s));
    return assemble(src, rows);
}

std::vector<Coord> sample_coords(const RadialProfile& base, std::size_t n, std::uint64_t seed,
                                 const SamplingWindow& window, double fiber_length) {
    require(n >= 1, ErrorCode::InvalidArgument, "need at least one sample");
    const SamplingWindow w = clip(base, window);

    // cumulative area measure f*phi dr on a fine grid, inverted linearly
    constexpr std::size_t kFine = 2001;
    std::vector<double> rs(kFine), cum(kFine, 0.0);
    const double x0 = base.r().front();
    auto density = [&](double r) {
        return std::max(0.0, cubic_uniform(x0, base.h(), base.f(), r)) *
               std::max(0.0, cubic_uniform(x0, base.h(), base.phi(), r));
    };
    for (std::size_t j = 0; j < kFine; ++j)
        rs[j] = w.r_lo + (w.r_hi - w.r_lo) * static_cast<double>(j) / (kFine - 1);
    double prev = density(rs[0]);
    for (std::size_t j = 1; j < kFine; ++j) {
        const double cur = density(rs[j]);
        cum[j] = cum[j - 1] + 0.5 * (prev + cur) * (rs[j] - rs[j - 1]);
        prev = cur;
    }
    require(cum.back() > 0.0, ErrorCode::WindowEmpty, "window carries no area");
    for (double& c : cum) c /= cum.back();

    std::mt19937_64 rng(seed);
    const double s1 = unit_from(rng);
    const double s2 = unit_from(rng);
    const double s3 = unit_from(rng);
    const double circ = kTwoPi * base.theta_period();

    std::vector<Coord> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = frac(halton(i + 1, 2) + s1);
        const std::size_t j = std::min<std::size_t>(
            static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), x) - cum.begin()),
            kFine - 1);
        const std::size_t jl = j == 0 ? 0 : j - 1;
        const double span = cum[j] - cum[jl];
        const double t = span > 0.0 ? (x - cum[jl]) / span : 0.0;
        out[i].r = rs[jl] + t * (rs[j] - rs[jl]);
        out[i].theta = circ * frac(halton(i + 1, 3) + s2);
        out[i].u = fiber_length > 0.0 ? fiber_length * frac(halton(i + 1, 5) + s3) : 0.0;
    }
    return out;
}

namespace {

FiniteMetricSpace finish_space(const MetricGraph& g, const std::vector<Coord>& pts,
                               const SamplingWindow& w) {
    const std::size_t n = pts.size();
    auto d = g.pairwise(pts);
    const auto from_origin = g.distances_from(g.nearest_node({w.r_lo, 0.0, 0.0}));
    std::size_t base = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (from_origin[g.nearest_node(pts[i])] < from_origin[g.nearest_node(pts[base])]) base = i;
    return FiniteMetricSpace(n, std::move(d), base);
}

}  // namespace

FiniteMetricSpace sample_space(const Warped3Metric& m, std::size_t n, std::uint64_t seed,
                               const SamplingWindow& window, const GraphResolution& res) {
    require(n >= 2, ErrorCode::InvalidArgument, "need at least two samples");
    const SamplingWindow w = clip(m.base, window);
    MetricGraph g(m, w, res);
    return finish_space(g, sample_coords(m.base, n, seed, w, m.fiber_length), w);
}

FiniteMetricSpace sample_space(const RadialProfile& p, std::size_t n, std::uint64_t seed,
                               const SamplingWindow& window, const GraphResolution& res) {
    require(n >= 2, ErrorCode::InvalidArgument, "need at least two samples");
    const SamplingWindow w = clip(p, window);
    MetricGraph g(p, w, res);
    return finish_space(g, sample_coords(p, n, seed, w), w);
}

FiniteMetricSpace sample_interval(double lo, double hi, std::size_t n, std::uint64_t seed) {
    require(n >= 2, ErrorCode::InvalidArgument, "need at least two samples");
    require(std::isfinite(lo) && std::isfinite(hi) && hi > lo, ErrorCode::WindowEmpty,
            "empty interval");
    std::mt19937_64 rng(seed);
    const double s = unit_from(rng);
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = lo + (hi - lo) * frac(halton(i + 1, 2) + s);
    const auto base =
        static_cast<std::size_t>(std::min_element(x.begin(), x.end()) - x.begin());
    return make_space(n, [&](std::size_t i, std::size_t j) { return std::abs(x[i] - x[j]); },
                      base);
}

}  // namespace rflab

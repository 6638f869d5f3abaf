#include "rflab/dilation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rflab/curvature.hpp"
#include "rflab/error.hpp"
#include "rflab/interp.hpp"
#include "rflab/parallel.hpp"

namespace rflab {

void SpectralHistory::validate() const {
    require(!times.empty(), ErrorCode::InvalidArgument, "empty history");
    require(positions.size() == times.size() && spectra.size() == times.size(),
            ErrorCode::InvalidArgument, "history fields differ in length");
    const std::size_t n = spectra.front().size();
    for (std::size_t i = 0; i < times.size(); ++i) {
        require(spectra[i].size() == n && positions[i].size() == n, ErrorCode::InvalidArgument,
                "history point count changes over time");
        if (i > 0)
            require(times[i] > times[i - 1], ErrorCode::InvalidArgument,
                    "history times must be strictly increasing");
    }
}

SpectralHistory history_from_solution(const SurfaceSolution& sol) {
    SpectralHistory h;
    h.closed_tip = sol[0].closed_tip();
    for (const auto& p : sol.profiles()) {
        h.times.push_back(p.time_stamp());
        h.positions.push_back(arclength(p));
        h.spectra.push_back(spectrum_of_surface_product(p));
    }
    return h;
}

namespace {

struct Candidate {
    double value = -std::numeric_limits<double>::infinity();
    std::size_t time = std::numeric_limits<std::size_t>::max();
    std::size_t point = std::numeric_limits<std::size_t>::max();
};

inline bool better(const Candidate& a, const Candidate& b) {
    if (a.value != b.value) return a.value > b.value;
    if (a.time != b.time) return a.time < b.time;
    return a.point < b.point;
}

inline double weight(double t, double T, double rm) { return t * (T - t) * rm; }

std::size_t last_time_index(const SpectralHistory& h, double T) {
    h.validate();
    require(T > 0.0, ErrorCode::InvalidArgument, "T must be positive");
    require(h.times.front() <= 0.0 + 1e-12 && h.times.back() >= T - 1e-12 * std::max(1.0, T),
            ErrorCode::WindowOutOfRange, "history does not cover [0, T]");
    std::size_t last = 0;
    while (last + 1 < h.times.size() && h.times[last + 1] <= T) ++last;
    return last;
}

DilationRecord make_record(const SpectralHistory& h, const Candidate& c, double sup, double T,
                           double eps) {
    require(sup > 0.0 && c.time != std::numeric_limits<std::size_t>::max(),
            ErrorCode::FlatHistory, "|Rm| vanishes on the recorded window");
    DilationRecord r;
    r.point_index = c.point;
    r.time_index = c.time;
    r.t_i = h.times[c.time];
    r.K_i = h.spectra[c.time].rm_norm()[c.point];
    r.T_i = T;
    r.epsilon_i = eps;
    r.alpha_i = r.t_i * r.K_i;
    r.omega_i = (T - r.t_i) * r.K_i;
    r.selection_ratio = c.value / sup;
    return r;
}

Candidate first_acceptable(const SpectralHistory& h, std::size_t last, double T, double floor) {
    for (std::size_t i = 0; i <= last; ++i) {
        auto rm = h.spectra[i].rm_norm();
        for (std::size_t j = 0; j < rm.size(); ++j) {
            const double v = weight(h.times[i], T, rm[j]);
            if (v > 0.0 && v >= floor) return {v, i, j};
        }
    }
    return {};
}

void check_selection_args(double epsilon) {
    require(epsilon >= 0.0 && epsilon < 1.0, ErrorCode::InvalidArgument,
            "epsilon must lie in [0, 1)");
}

}  // namespace

DilationRecord select_point_serial(const SpectralHistory& h, double T, double epsilon,
                                   SelectionMode mode) {
    check_selection_args(epsilon);
    const std::size_t last = last_time_index(h, T);
    Candidate best;
    for (std::size_t i = 0; i <= last; ++i) {
        auto rm = h.spectra[i].rm_norm();
        for (std::size_t j = 0; j < rm.size(); ++j) {
            Candidate c{weight(h.times[i], T, rm[j]), i, j};
            if (better(c, best)) best = c;
        }
    }
    const double sup = best.value;
    if (mode == SelectionMode::FirstAcceptable && sup > 0.0)
        best = first_acceptable(h, last, T, (1.0 - epsilon) * sup);
    return make_record(h, best, sup, T, epsilon);
}

DilationRecord select_point(const SpectralHistory& h, double T, double epsilon,
                            SelectionMode mode) {
    check_selection_args(epsilon);
    const std::size_t last = last_time_index(h, T);
    const auto slices = static_cast<std::ptrdiff_t>(last + 1);
    const auto work = slices * static_cast<std::ptrdiff_t>(h.points());
    Candidate best;
#pragma omp parallel if (work >= kParallelGridThreshold)
    {
        Candidate local;
#pragma omp for schedule(static) nowait
        for (std::ptrdiff_t ii = 0; ii < slices; ++ii) {
            const auto i = static_cast<std::size_t>(ii);
            auto rm = h.spectra[i].rm_norm();
            for (std::size_t j = 0; j < rm.size(); ++j) {
                Candidate c{weight(h.times[i], T, rm[j]), i, j};
                if (better(c, local)) local = c;
            }
        }
#pragma omp critical(rflab_select_point)
        if (better(local, best)) best = local;
    }
    const double sup = best.value;
    if (mode == SelectionMode::FirstAcceptable && sup > 0.0)
        best = first_acceptable(h, last, T, (1.0 - epsilon) * sup);
    return make_record(h, best, sup, T, epsilon);
}

double rescaled_bound(const DilationRecord& rec, double t) {
    require(t > -rec.alpha_i && t < rec.omega_i, ErrorCode::DomainError,
            "rescaled bound only holds on (-alpha_i, omega_i)");
    return 1.0 / (1.0 - rec.epsilon_i) * (rec.alpha_i / (rec.alpha_i + t)) *
           (rec.omega_i / (rec.omega_i - t));
}

namespace {

// Output times in original units, with their rescaled labels.
std::vector<std::pair<double, double>> window_times(std::span<const double> times,
                                                    const DilationRecord& rec, double beta,
                                                    double psi) {
    require(beta < 0.0 && psi > 0.0, ErrorCode::InvalidArgument, "need beta < 0 < psi");
    require(rec.K_i > 0.0, ErrorCode::InvalidArgument, "K_i must be positive");
    const double lo = rec.t_i + beta / rec.K_i, hi = rec.t_i + psi / rec.K_i;
    const double slack = 1e-12 * std::max(1.0, std::abs(times.back()));
    require(lo >= times.front() - slack && hi <= times.back() + slack, ErrorCode::WindowOutOfRange,
            "rescaling window leaves the recorded history");
    std::vector<std::pair<double, double>> out;
    out.emplace_back(lo, beta);
    for (double t : times)
        if (t > lo + slack && t < hi - slack) out.emplace_back(t, (t - rec.t_i) * rec.K_i);
    out.emplace_back(rec.t_i, 0.0);
    out.emplace_back(hi, psi);
    std::sort(out.begin(), out.end());
    std::vector<std::pair<double, double>> uniq;
    for (const auto& p : out)
        if (uniq.empty() || p.first > uniq.back().first + slack) uniq.push_back(p);
    // exact labels at the recorded selection time
    for (auto& p : uniq)
        if (std::abs(p.first - rec.t_i) <= slack) p = {rec.t_i, 0.0};
    return uniq;
}

std::ptrdiff_t exact_index(std::span<const double> times, double t) {
    const double slack = 1e-12 * std::max(1.0, std::abs(times.back()));
    auto it = std::lower_bound(times.begin(), times.end(), t - slack);
    if (it != times.end() && std::abs(*it - t) <= slack) return it - times.begin();
    return -1;
}

}  // namespace

SurfaceSolution rescale(const SurfaceSolution& sol, const DilationRecord& rec, double beta,
                        double psi) {
    const auto& times = sol.times();
    const double scale = std::sqrt(rec.K_i);
    std::vector<RadialProfile> out;
    for (auto [t, tau] : window_times(times, rec, beta, psi)) {
        std::vector<double> phi, f;
        const RadialProfile* shape = nullptr;
        if (auto k = exact_index(times, t); k >= 0) {
            shape = &sol[static_cast<std::size_t>(k)];
            phi.assign(shape->phi().begin(), shape->phi().end());
            f.assign(shape->f().begin(), shape->f().end());
        } else {
            const std::size_t i = bracket(times, t);
            const auto& a = sol[i];
            const auto& b = sol[i + 1];
            const auto ra = flow_rate(a), rb = flow_rate(b);
            // theta_period may differ between records; compare f in a's units
            const double fold = b.theta_period() / a.theta_period();
            phi.resize(a.size());
            f.resize(a.size());
            for (std::size_t j = 0; j < a.size(); ++j) {
                phi[j] = hermite(times[i], times[i + 1], a.phi()[j], b.phi()[j], ra.phi_t[j],
                                 rb.phi_t[j], t);
                f[j] = hermite(times[i], times[i + 1], a.f()[j], fold * b.f()[j], ra.f_t[j],
                               fold * rb.f_t[j], t);
            }
            shape = &a;
        }
        for (double& x : phi) x *= scale;
        for (double& x : f) x *= scale;
        auto o = shape->options();
        o.time_stamp = tau;
        o.tip_tolerance = std::max(o.tip_tolerance, 1e-2);
        out.emplace_back(std::vector<double>(shape->r().begin(), shape->r().end()), std::move(phi),
                         std::move(f), o);
    }
    return SurfaceSolution(std::move(out));
}

namespace {

// Nonuniform centered slope of v at index i.
double fd_slope(std::span<const double> t, const std::vector<double>& v, std::size_t i) {
    const std::size_t n = t.size();
    if (n < 2) return 0.0;
    if (i == 0) return (v[1] - v[0]) / (t[1] - t[0]);
    if (i == n - 1) return (v[n - 1] - v[n - 2]) / (t[n - 1] - t[n - 2]);
    const double h0 = t[i] - t[i - 1], h1 = t[i + 1] - t[i];
    return (h0 * h0 * (v[i + 1] - v[i]) + h1 * h1 * (v[i] - v[i - 1])) / (h0 * h1 * (h0 + h1));
}

}  // namespace

SpectralHistory rescale(const SpectralHistory& hist, const DilationRecord& rec, double beta,
                        double psi) {
    hist.validate();
    const auto& times = hist.times;
    const double scale = std::sqrt(rec.K_i);
    const std::size_t n = hist.points();
    SpectralHistory out;
    out.closed_tip = hist.closed_tip;
    for (auto [t, tau] : window_times(times, rec, beta, psi)) {
        std::vector<double> l[3], pos(n);
        for (auto& v : l) v.resize(n);
        if (auto k = exact_index(times, t); k >= 0) {
            const auto& s = hist.spectra[static_cast<std::size_t>(k)];
            for (std::size_t j = 0; j < n; ++j) {
                l[0][j] = s.lambda1()[j];
                l[1][j] = s.lambda2()[j];
                l[2][j] = s.lambda3()[j];
                pos[j] = hist.positions[static_cast<std::size_t>(k)][j];
            }
        } else {
            const std::size_t i = bracket(times, t);
            std::vector<double> col(times.size());
            for (std::size_t j = 0; j < n; ++j) {
                auto interp = [&](auto get) {
                    for (std::size_t q = 0; q < times.size(); ++q) col[q] = get(q);
                    return hermite(times[i], times[i + 1], col[i], col[i + 1],
                                   fd_slope(times, col, i), fd_slope(times, col, i + 1), t);
                };
                l[0][j] = interp([&](std::size_t q) { return hist.spectra[q].lambda1()[j]; });
                l[1][j] = interp([&](std::size_t q) { return hist.spectra[q].lambda2()[j]; });
                l[2][j] = interp([&](std::size_t q) { return hist.spectra[q].lambda3()[j]; });
                pos[j] = interp([&](std::size_t q) { return hist.positions[q][j]; });
            }
        }
        for (auto& v : l)
            for (double& x : v) x /= rec.K_i;
        for (double& x : pos) x *= scale;
        out.times.push_back(tau);
        out.positions.push_back(std::move(pos));
        out.spectra.emplace_back(std::move(l[0]), std::move(l[1]), std::move(l[2]));
    }
    return out;
}

DilatableResult dilatable_check(const SpectralHistory& h, const DilationRecord& rec, double beta,
                                double psi, double rho) {
    h.validate();
    require(rho > 0.0, ErrorCode::InvalidArgument, "rho must be positive");
    require(rec.time_index < h.times.size() && rec.point_index < h.points(),
            ErrorCode::InvalidArgument, "record does not index this history");
    const auto wt = window_times(h.times, rec, beta, psi);
    const double lo_t = wt.front().first, hi_t = wt.back().first;

    DilatableResult res;
    const auto& pos = h.positions[rec.time_index];
    const double radius = rho / std::sqrt(rec.K_i);
    const double center = pos[rec.point_index];
    const double smin = *std::min_element(pos.begin(), pos.end());
    const double smax = *std::max_element(pos.begin(), pos.end());
    if (center + radius > smax) res.ball_in_grid = false;
    if (center - radius < smin && !h.closed_tip) res.ball_in_grid = false;

    std::vector<std::size_t> ball;
    for (std::size_t j = 0; j < pos.size(); ++j)
        if (std::abs(pos[j] - center) <= radius) ball.push_back(j);
    res.ball_lo = ball.front();
    res.ball_hi = ball.back();

    const double slack = 1e-12 * std::max(1.0, std::abs(h.times.back()));
    for (std::size_t i = 0; i < h.times.size(); ++i) {
        if (h.times[i] < lo_t - slack || h.times[i] > hi_t + slack) continue;
        ++res.times_used;
        auto rm = h.spectra[i].rm_norm();
        for (std::size_t j : ball) res.C = std::max(res.C, rm[j] / rec.K_i);
    }
    return res;
}

}  // namespace rflab

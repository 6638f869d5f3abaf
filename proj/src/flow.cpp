#include "rflab/flow.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rflab/curvature.hpp"
#include "rflab/error.hpp"

namespace rflab {

SurfaceSolution::SurfaceSolution(std::vector<RadialProfile> profiles,
                                 std::optional<double> blowup_time)
    : profiles_(std::move(profiles)), blowup_time_(blowup_time) {
    require(!profiles_.empty(), ErrorCode::InvalidArgument, "empty solution");
    const auto& first = profiles_.front();
    for (std::size_t i = 0; i < profiles_.size(); ++i) {
        const auto& p = profiles_[i];
        if (i > 0)
            require(p.time_stamp() > times_.back(), ErrorCode::InvalidArgument,
                    "solution times must be strictly increasing");
        require(p.size() == first.size() && p.r().front() == first.r().front() &&
                    p.h() == first.h(),
                ErrorCode::InvalidArgument, "solution profiles must share one grid");
        require(p.closed_tip() == first.closed_tip() && p.closed_end() == first.closed_end(),
                ErrorCode::InvalidArgument, "solution profiles must share tip type");
        times_.push_back(p.time_stamp());
    }
}

namespace {

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double dt_bound(double h, std::span<const double> phi, double max_k, const FlowOptions& o) {
    const double pmin = *std::min_element(phi.begin(), phi.end());
    double bound = (h * pmin) * (h * pmin);
    if (max_k > 0.0) bound = std::min(bound, 1.0 / max_k);
    return o.cfl_fraction * bound;
}

struct State {
    std::vector<double> phi, f;
};

// k = -K * state, written into rate; returns max |K|.
double rate(const RadialProfile& shape, const State& s, State& out, std::vector<double>& k) {
    ProfileView v{shape.h(), s.phi, s.f, shape.closed_tip(), shape.closed_end()};
    gauss_curvature_into(v, k);
    const std::size_t n = k.size();
    out.phi.resize(n);
    out.f.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        out.phi[j] = -k[j] * s.phi[j];
        out.f[j] = -k[j] * s.f[j];
    }
    return max_abs(k);
}

}  // namespace

double stable_dt(const RadialProfile& p, const FlowOptions& opts) {
    auto k = gauss_curvature(p);
    return dt_bound(p.h(), p.phi(), max_abs(k), opts);
}

ProfileRate flow_rate(const RadialProfile& p) {
    State s{{p.phi().begin(), p.phi().end()}, {p.f().begin(), p.f().end()}}, out;
    std::vector<double> k(p.size());
    rate(p, s, out, k);
    return {std::move(out.phi), std::move(out.f)};
}

namespace {

// Buffers reused across steps; prepare() evaluates the first stage so the
// caller can size dt from the same curvature evaluation.
class Rk4 {
public:
    double prepare(const RadialProfile& p) {
        const std::size_t n = p.size();
        y_.phi.assign(p.phi().begin(), p.phi().end());
        y_.f.assign(p.f().begin(), p.f().end());
        tmp_.phi.resize(n);
        tmp_.f.resize(n);
        k_.resize(n);
        return rate(p, y_, k1_, k_);
    }

    RadialProfile finish(const RadialProfile& p, double dt, const FlowOptions& opts) {
        const std::size_t n = p.size();
        auto axpy = [&](const State& d, double a) {
            for (std::size_t j = 0; j < n; ++j) {
                tmp_.phi[j] = y_.phi[j] + a * d.phi[j];
                tmp_.f[j] = y_.f[j] + a * d.f[j];
            }
        };
        axpy(k1_, 0.5 * dt);
        rate(p, tmp_, k2_, k_);
        axpy(k2_, 0.5 * dt);
        rate(p, tmp_, k3_, k_);
        axpy(k3_, dt);
        rate(p, tmp_, k4_, k_);

        std::vector<double> phi(n), f(n);
        for (std::size_t j = 0; j < n; ++j) {
            phi[j] = y_.phi[j] + dt / 6.0 * (k1_.phi[j] + 2.0 * k2_.phi[j] + 2.0 * k3_.phi[j] + k4_.phi[j]);
            f[j] = y_.f[j] + dt / 6.0 * (k1_.f[j] + 2.0 * k2_.f[j] + 2.0 * k3_.f[j] + k4_.f[j]);
        }
        // f vanishes identically at fixed points; keep it exact
        if (p.closed_tip()) f.front() = 0.0;
        if (p.closed_end()) f.back() = 0.0;

        auto o = p.options();
        o.time_stamp = p.time_stamp() + dt;
        if (opts.renormalize_tip && p.closed_tip()) {
            const double ratio = (8.0 * f[1] - f[2]) / (6.0 * p.h()) / phi[0];
            const double c = 1.0 / (static_cast<double>(p.cone_order()) * ratio);
            for (double& x : f) x *= c;
            o.theta_period /= c;
        }
        return RadialProfile(std::vector<double>(p.r().begin(), p.r().end()), std::move(phi),
                             std::move(f), o);
    }

private:
    State y_, k1_, k2_, k3_, k4_, tmp_;
    std::vector<double> k_;
};

}  // namespace

RadialProfile step(const RadialProfile& p, double dt, const FlowOptions& opts) {
    require(dt > 0.0, ErrorCode::InvalidArgument, "dt must be positive");
    Rk4 rk;
    const double kmax = rk.prepare(p);
    require(kmax <= opts.curvature_ceiling, ErrorCode::CurvatureBlowup,
            "max|K| = " + std::to_string(kmax) + " exceeds the ceiling");
    const double bound = dt_bound(p.h(), p.phi(), kmax, opts);
    require(dt <= bound * (1.0 + 1e-12), ErrorCode::CflViolation,
            "dt = " + std::to_string(dt) + " exceeds the stability bound " + std::to_string(bound));
    return rk.finish(p, dt, opts);
}

SurfaceSolution evolve(const RadialProfile& p, double t_end, const EvolveOptions& opts) {
    require(t_end > p.time_stamp(), ErrorCode::InvalidArgument, "t_end must exceed the start time");
    require(opts.output_stride >= 1, ErrorCode::InvalidArgument, "output_stride must be >= 1");
    std::vector<RadialProfile> out{p};
    RadialProfile cur = p;
    std::optional<double> blowup;
    std::size_t steps = 0;
    const double t0 = p.time_stamp();
    const double eps_t = 1e-12 * std::max(1.0, std::abs(t_end));
    std::size_t next_mark = 1;
    Rk4 rk;

    while (true) {
        const double kmax = rk.prepare(cur);
        if (kmax > opts.flow.curvature_ceiling) {
            blowup = cur.time_stamp();
            break;
        }
        if (cur.time_stamp() >= t_end - eps_t) break;
        double dt = dt_bound(cur.h(), cur.phi(), kmax, opts.flow);
        double target = t_end;
        if (opts.record_interval > 0.0)
            target = std::min(t_end, t0 + static_cast<double>(next_mark) * opts.record_interval);
        bool lands = false;
        if (cur.time_stamp() + dt >= target - eps_t) {
            dt = target - cur.time_stamp();
            lands = true;
        }
        RadialProfile nxt = rk.finish(cur, dt, opts.flow);
        if (lands) nxt = nxt.with_time(target);
        cur = std::move(nxt);
        ++steps;

        bool record = false;
        if (opts.record_interval > 0.0) {
            if (lands) {
                record = true;
                ++next_mark;
            }
        } else {
            record = steps % opts.output_stride == 0;
        }
        if (cur.time_stamp() >= t_end - eps_t) record = true;
        if (record) out.push_back(cur);
    }
    return SurfaceSolution(std::move(out), blowup);
}

std::vector<Warped3Metric> lift_product(const SurfaceSolution& sol, double fiber_length) {
    require(fiber_length > 0.0, ErrorCode::InvalidArgument, "fiber_length must be positive");
    std::vector<Warped3Metric> out;
    out.reserve(sol.size());
    for (const auto& p : sol.profiles()) out.emplace_back(p, fiber_length);
    return out;
}

}  // namespace rflab

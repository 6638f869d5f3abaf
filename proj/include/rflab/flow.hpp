#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "rflab/profile.hpp"

namespace rflab {

struct FlowOptions {
    /// dt <= cfl_fraction * min((h min phi)^2, 1 / max|K|)
    double cfl_fraction = 0.2;
    /// |K| above this signals a singularity inside the time window.
    double curvature_ceiling = 1e6;
    /// Restore f'(tip)/phi(tip) = 1/cone_order after every step by rescaling f
    /// and folding the factor into theta_period.
    bool renormalize_tip = true;
};

/// Time-indexed Ricci-flow trajectory; all profiles share one grid and tip type.
class SurfaceSolution {
public:
    SurfaceSolution() = default;
    explicit SurfaceSolution(std::vector<RadialProfile> profiles,
                             std::optional<double> blowup_time = std::nullopt);

    const std::vector<RadialProfile>& profiles() const { return profiles_; }
    const std::vector<double>& times() const { return times_; }
    std::size_t size() const { return profiles_.size(); }
    const RadialProfile& operator[](std::size_t i) const { return profiles_[i]; }
    const RadialProfile& back() const { return profiles_.back(); }
    bool blew_up() const { return blowup_time_.has_value(); }
    std::optional<double> blowup_time() const { return blowup_time_; }

private:
    std::vector<RadialProfile> profiles_;
    std::vector<double> times_;
    std::optional<double> blowup_time_;
};

/// Largest dt accepted by `step` for this profile.
double stable_dt(const RadialProfile& p, const FlowOptions& opts = {});

/// One explicit RK4 step of phi_t = -K phi, f_t = -K f.
RadialProfile step(const RadialProfile& p, double dt, const FlowOptions& opts = {});

struct EvolveOptions {
    FlowOptions flow;
    /// Record every n-th step (the initial and final states are always recorded).
    std::size_t output_stride = 1;
    /// When > 0, steps are clipped to land on multiples of this interval and
    /// exactly those states are recorded; output_stride is then ignored.
    double record_interval = 0.0;
};

/// Repeated stable steps up to t_end. On curvature blowup the partial solution
/// is returned with its blowup marker set.
SurfaceSolution evolve(const RadialProfile& p, double t_end, const EvolveOptions& opts = {});

/// Time derivative (phi_t, f_t) = (-K phi, -K f) of a profile.
struct ProfileRate {
    std::vector<double> phi_t;
    std::vector<double> f_t;
};
ProfileRate flow_rate(const RadialProfile& p);

/// Product of each surface with a static circle of length fiber_length.
std::vector<Warped3Metric> lift_product(const SurfaceSolution& sol, double fiber_length);

}  // namespace rflab

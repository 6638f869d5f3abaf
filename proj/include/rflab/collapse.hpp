#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "rflab/flow.hpp"
#include "rflab/metric_space.hpp"
#include "rflab/profile.hpp"

namespace rflab {

struct Twist {
    double a = 0.0;
    double b = 1.0;
};

/// Sequence of 3-metrics over one surface solution with shrinking fibers.
struct CollapseFamily {
    SurfaceSolution base_solution;
    std::vector<double> epsilons;
    std::optional<Twist> twist;
    /// members[i][k]: fiber epsilons[i] over base_solution[k].
    std::vector<std::vector<Warped3Metric>> members;
};

CollapseFamily make_family(const SurfaceSolution& sol, std::vector<double> epsilons,
                           std::optional<Twist> twist = std::nullopt);

/// Half the length of the fiber loop through the point. With a twist the loop
/// closes after a theta rotation of a*eps/b, so its length is
/// eps * sqrt(1 + (a f / b)^2).
double inj_proxy(const Warped3Metric& m, std::size_t point_index);

/// Radial extent of the sampled region; theta and the fiber are sampled whole.
struct SamplingWindow {
    double r_lo = 0.0;
    double r_hi = 1.0;
};

struct GraphResolution {
    double dr = 0.05;
    std::size_t n_theta = 64;
    std::size_t n_u = 8;
};

struct Coord {
    double r = 0.0;
    double theta = 0.0;  ///< radians, period 2*pi*theta_period
    double u = 0.0;      ///< fiber coordinate, period fiber_length
};

/// Shortest-path discretization of a warped metric on the window. Nodes form an
/// (r, theta, u) lattice; each node links to its 16 planar neighbours
/// (offsets up to 2 in r and theta), crossed with u offsets {-1, 0, 1}.
/// Edge lengths use the metric coefficients at the edge midpoint.
class MetricGraph {
public:
    MetricGraph(const RadialProfile& base, const SamplingWindow& window,
                const GraphResolution& res = {});
    MetricGraph(const Warped3Metric& m, const SamplingWindow& window,
                const GraphResolution& res = {});

    std::size_t node_count() const { return nr_ * nt_ * nu_; }
    std::size_t nearest_node(const Coord& c) const;
    Coord node_coord(std::size_t node) const;
    bool three_dimensional() const { return nu_ > 1; }

    /// Dijkstra distances from one node to every node.
    std::vector<double> distances_from(std::size_t source) const;

    /// Pairwise distances between the nodes nearest to `points`, row-major.
    std::vector<double> pairwise(const std::vector<Coord>& points) const;
    std::vector<double> pairwise_serial(const std::vector<Coord>& points) const;

    double distance(const Coord& a, const Coord& b) const;

private:
    void build(const RadialProfile& base, const SamplingWindow& window,
               const GraphResolution& res, double fiber, double a, double b);
    std::vector<std::size_t> sources_of(const std::vector<Coord>& points) const;
    std::vector<double> assemble(const std::vector<std::size_t>& src,
                                 const std::vector<std::vector<double>>& rows) const;

    std::size_t nr_ = 0, nt_ = 1, nu_ = 1;
    double r0_ = 0.0, dr_ = 0.0, dtheta_ = 0.0, du_ = 0.0;
    std::ptrdiff_t wrap_shift_ = 0;
    std::vector<double> phi_half_, f_half_;  ///< coefficients on the half grid
};

/// Point sets and the matching samplers. The same (n, seed, window) yields the
/// same base coordinates for surface and 3-metric samples, so a product sample
/// projects onto the surface sample.
std::vector<Coord> sample_coords(const RadialProfile& base, std::size_t n, std::uint64_t seed,
                                 const SamplingWindow& window, double fiber_length = 0.0);

/// Samples are low-discrepancy in (measure fraction in r, theta, u) and snap to
/// graph nodes. The base point is the sample closest to (r_lo, 0, 0).
FiniteMetricSpace sample_space(const Warped3Metric& m, std::size_t n, std::uint64_t seed,
                               const SamplingWindow& window, const GraphResolution& res = {});
FiniteMetricSpace sample_space(const RadialProfile& p, std::size_t n, std::uint64_t seed,
                               const SamplingWindow& window, const GraphResolution& res = {});
/// Interval [lo, hi] with the standard metric.
FiniteMetricSpace sample_interval(double lo, double hi, std::size_t n, std::uint64_t seed);

/// Radical inverse of i in the given base.
double halton(std::uint64_t i, unsigned base);

}  // namespace rflab

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "rflab/metric_space.hpp"

namespace rflab {

enum class GhMode {
    Pointed,    ///< correspondences must pair the two base points
    Unpointed,
};

inline constexpr std::size_t kExactGhLimit = 8;

/// Half the minimal distortion over all correspondences, by branch and bound
/// over pairs of maps A -> B, B -> A. `limit` may only lower the 8-point cap.
double gh_exact(const FiniteMetricSpace& A, const FiniteMetricSpace& B,
                GhMode mode = GhMode::Pointed, std::size_t limit = kExactGhLimit);

struct GhBounds {
    double lower = 0.0;
    double upper = 0.0;
    /// Correspondence realizing `upper`: f[a] in B and g[b] in A.
    std::vector<std::size_t> f, g;
};

/// lower: diameter and eccentricity (and, pointed, base-distance) mismatch.
/// upper: half the distortion of the best correspondence found by greedy
/// construction with local refinement over `iterations` randomized restarts.
GhBounds gh_bound(const FiniteMetricSpace& A, const FiniteMetricSpace& B,
                  std::size_t iterations = 16, std::uint64_t seed = 0,
                  GhMode mode = GhMode::Pointed);
/// Serial reference of gh_bound (identical result).
GhBounds gh_bound_serial(const FiniteMetricSpace& A, const FiniteMetricSpace& B,
                         std::size_t iterations = 16, std::uint64_t seed = 0,
                         GhMode mode = GhMode::Pointed);

/// Distortion of the correspondence graph(f) U graph(g)^T.
double distortion(const FiniteMetricSpace& A, const FiniteMetricSpace& B,
                  const std::vector<std::size_t>& f, const std::vector<std::size_t>& g);

struct DimensionOptions {
    double lo_percentile = 5.0;
    double hi_percentile = 50.0;
    std::size_t scales = 12;
};

struct DimensionEstimate {
    double dimension = 0.0;
    double residual = 0.0;  ///< RMS of the log-log fit
    double r_min = 0.0, r_max = 0.0;
    std::size_t scales_used = 0;
};

/// Slope of log N(r) against log r, where N(r) is the mean number of other
/// points within r, over log-spaced r between two distance percentiles.
DimensionEstimate dim_estimate(const FiniteMetricSpace& A, const DimensionOptions& opts = {});

}  // namespace rflab

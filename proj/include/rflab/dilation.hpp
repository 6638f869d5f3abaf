#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "rflab/flow.hpp"
#include "rflab/profile.hpp"

namespace rflab {

/// Curvature spectra on a fixed set of points over time, with the radial
/// arclength position of every point at every time (for ball membership).
struct SpectralHistory {
    std::vector<double> times;
    std::vector<std::vector<double>> positions;
    std::vector<CurvatureSpectrum> spectra;
    /// The smallest position is a rotation fixed point (balls may reach it).
    bool closed_tip = false;

    void validate() const;
    std::size_t points() const { return spectra.empty() ? 0 : spectra.front().size(); }
};

/// Product lift spectra (0, 0, 2K) and arclength positions of a surface flow.
SpectralHistory history_from_solution(const SurfaceSolution& sol);

struct DilationRecord {
    std::size_t point_index = 0;
    std::size_t time_index = 0;
    double t_i = 0.0;
    double K_i = 0.0;
    double T_i = 0.0;
    double epsilon_i = 0.0;
    double alpha_i = 0.0;  ///< t_i K_i
    double omega_i = 0.0;  ///< (T_i - t_i) K_i
    /// t_i (T_i - t_i) K_i over the recorded sup of t (T_i - t) |Rm|.
    double selection_ratio = 1.0;
};

enum class SelectionMode {
    Argmax,           ///< the recorded maximizer
    FirstAcceptable,  ///< earliest (time, point) with ratio >= 1 - epsilon
};

/// Maximizes t (T - t) |Rm| over recorded points with t <= T. Ties go to the
/// smallest time index, then the smallest point index. Parallel over time slices.
DilationRecord select_point(const SpectralHistory& history, double T, double epsilon,
                            SelectionMode mode = SelectionMode::Argmax);
/// Serial reference of select_point.
DilationRecord select_point_serial(const SpectralHistory& history, double T, double epsilon,
                                   SelectionMode mode = SelectionMode::Argmax);

/// g_new(tau) = K_i g(t_i + tau/K_i) on [beta, psi]. Output times are beta, every
/// recorded time inside the window, 0 and psi; off-record states use cubic
/// Hermite interpolation with the flow's own time derivative.
SurfaceSolution rescale(const SurfaceSolution& sol, const DilationRecord& rec, double beta,
                        double psi);

/// Spectra divided by K_i, positions multiplied by sqrt(K_i); same output times
/// as `rescale`, interpolated with finite-difference Hermite slopes.
SpectralHistory rescale(const SpectralHistory& hist, const DilationRecord& rec, double beta,
                        double psi);

/// (1/(1 - eps)) * (alpha / (alpha + t)) * (omega / (omega - t)) on (-alpha, omega).
double rescaled_bound(const DilationRecord& rec, double t);

struct DilatableResult {
    double C = 0.0;             ///< max over the spacetime window of |Rm| / K_i
    bool ball_in_grid = true;   ///< false: the ball left the truncated domain
    std::size_t ball_lo = 0, ball_hi = 0;
    std::size_t times_used = 0;
};

/// Ball of radius rho / sqrt(K_i) about x_i at time t_i, times in
/// [t_i + beta/K_i, t_i + psi/K_i].
DilatableResult dilatable_check(const SpectralHistory& history, const DilationRecord& rec,
                                double beta, double psi, double rho);

}  // namespace rflab

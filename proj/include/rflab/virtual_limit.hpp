#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rflab/flow.hpp"
#include "rflab/profile.hpp"

namespace rflab {

struct OverlapFit {
    double r0 = 0.0;           ///< right(x) matches left(x + r0)
    double theta_scale = 1.0;  ///< theta_period(left) / theta_period(right)
    double residual = 0.0;     ///< max mismatch of f * theta_period and phi on the overlap
    double overlap_length = 0.0;
};

struct ShiftRange {
    double lo = -1.0;
    double hi = 1.0;
};

inline constexpr double kOverlapTolerance = 1e-3;

/// Least-squares shift between two profiles on a sub-grid of spacing h/16, with
/// cubic interpolation of the left profile. Compares f * theta_period and phi.
OverlapFit overlap_identify(const RadialProfile& left, const RadialProfile& right,
                            const ShiftRange& search, double tolerance = kOverlapTolerance);

/// Piece of a global profile in local coordinates r_local = r - center_r.
struct ProfileWindow {
    RadialProfile profile;
    double center_r = 0.0;
    std::optional<OverlapFit> overlap_left;
    std::optional<OverlapFit> overlap_right;
};

/// Windows [0, 3u) and (4k - 3, 4k + 3)u measured from the first grid point.
/// Windows with fewer than 5 grid points are dropped.
std::vector<ProfileWindow> cut_windows(const RadialProfile& p, double unit = 1.0);

struct GlueOptions {
    double seam_tolerance = 1e-2;
    double overlap_tolerance = kOverlapTolerance;
    /// Shift search half-width around the nominal center difference.
    double search_half_width = 1.0;
};

struct GlueResult {
    RadialProfile profile;
    std::vector<ProfileWindow> windows;  ///< with overlap records filled in
    double max_residual = 0.0;
};

/// Smoothly blended union of a chain of windows, theta_period folded into f.
/// The chain restarts at the last window that closes on its left and stops at
/// the first window that closes on its right.
GlueResult glue(std::vector<ProfileWindow> windows, const GlueOptions& opts = {});

inline constexpr double kConeTolerance = 0.02;
inline constexpr int kMaxConeOrder = 12;

/// Tip at r = 0 with f'(0)/phi(0) folded to exactly 1/p (cone_order p).
/// A profile that closes on its right end is reflected first.
RadialProfile extend_to_disk(const RadialProfile& p, double tolerance = kConeTolerance);

enum class GammaKind { Trivial, Z2ThetaU, Z2RU, Z2RTheta, SO2, O2, Zp, D2p };

struct GammaDescriptor {
    GammaKind kind = GammaKind::Trivial;
    int p = 1;
};

std::optional<GammaDescriptor> parse_gamma(const std::string& s, int p = 1);
std::string to_string(const GammaDescriptor& g);

struct LocalModel {
    bool excluded = false;
    std::string exclusion;       ///< reason when excluded
    std::string case_id;         ///< "1i" ... "2bii"
    std::string gamma;
    std::string g_infty0;
    std::string local_topology;  ///< open_interval, half_interval, disk_mod_Zp, disk_mod_D2p
    int p = 0;                   ///< group order parameter for 2bi / 2bii

    bool operator==(const LocalModel&) const = default;
};

LocalModel classify_local_model(int m, const GammaDescriptor& gamma, double a, double b,
                                bool has_fixed_point);

struct OrbifoldPoint {
    std::size_t index = 0;
    double position = 0.0;
    int cone_order = 1;
    bool dihedral = false;
};

struct SingularReport {
    std::vector<OrbifoldPoint> singular;
    bool rule_violation = false;
    std::string diagnostic;
};

/// Lists cone and dihedral points. More than one together with min_K > 0 is
/// flagged as inconsistent data.
SingularReport detect_singular_points(const std::vector<OrbifoldPoint>& points, double min_K);

struct CigarOptions {
    std::size_t trim_end = 5;  ///< grid points dropped at the far end
    double s_max = 0.0;        ///< > 0 further limits the arclength window
};

struct CigarReport {
    double deviation = 0.0;        ///< max over times and window of |K/K_tip - sech^2(sigma s)|
    double final_deviation = 0.0;
    double k_tip_drift = 0.0;      ///< max |K_tip(t)/K_tip(0) - 1|
    double sup_scalar_drift = 0.0; ///< same for sup K
    double sigma = 0.0;            ///< at the final time
    std::vector<std::pair<double, double>> curve;  ///< (s, K/K_tip) at the final time
};

CigarReport cigar_compare(const SurfaceSolution& sol, const CigarOptions& opts = {});
CigarReport cigar_compare(const RadialProfile& p, const CigarOptions& opts = {});

}  // namespace rflab

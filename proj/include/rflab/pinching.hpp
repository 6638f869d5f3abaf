#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "rflab/profile.hpp"

namespace rflab {

struct PinchingParams {
    double C0 = 1.0;         ///< initial bound lambda1 >= -C0
    double tolerance = 0.0;  ///< slack on the comparison R >= threshold

    void validate() const;
};

/// -lambda1 * [ln(-lambda1) + ln(1 + C0 t) - ln C0 - 3], the scalar curvature
/// floor wherever lambda1 < 0.
double hamilton_ivey_threshold(double lambda1, const PinchingParams& params, double t);

/// -1/2 * lambda1 * ln[-lambda1 (1/C0 + t) e^-2]; negative values are vacuous.
double lambda3_lower_bound(double lambda1, const PinchingParams& params, double t);

struct PinchingViolation {
    std::size_t point_index;
    std::size_t time_index;
    double lambda1;
    double scalar;
    double threshold;
};

struct PinchingReport {
    std::vector<PinchingViolation> violations;
    bool holds() const { return violations.empty(); }
};

/// Flags every (point, time) with lambda1 < 0 and R < threshold - tolerance.
PinchingReport check_pinching(std::span<const double> times,
                              std::span<const CurvatureSpectrum> spectra,
                              const PinchingParams& params);

struct BumpLike {
    double c;          ///< witness lambda1 / |Rm|
    double threshold;  ///< the c_threshold the verdict was made against
};
struct SplitLike {
    double ratio;      ///< observed lambda1 / |Rm|
    double threshold;
};
using OriginKind = std::variant<BumpLike, SplitLike>;

inline constexpr double kDefaultBumpThreshold = 0.1;

OriginKind classify_origin(double l1, double l2, double l3,
                           double c_threshold = kDefaultBumpThreshold);

enum class SequenceKind { TypeIIILike, TypeIIbLike, Indeterminate };
std::string to_string(SequenceKind k);

struct SequenceVerdict {
    SequenceKind kind;
    std::vector<double> tK;  ///< raw t_i * K_i
};

/// Type III if t_i K_i <= C for all i. Type IIb if t K ends above 10x its first
/// value and is nondecreasing over the final half of the sample.
SequenceVerdict classify_sequence(std::span<const double> t, std::span<const double> K, double C);

struct AnscResult {
    bool holds;
    double worst_ratio;  ///< min_i (min lambda1 on member i) / delta_i
};

/// Each member i is the list of lambda1 values on its ball; holds iff
/// min lambda1 >= -delta_i for every member.
AnscResult ansc_verify(std::span<const std::vector<double>> lambda1_per_member,
                       std::span<const double> deltas);

/// delta_i = delta0 * 2^-i
std::vector<double> geometric_deltas(double delta0, std::size_t n);

struct SequenceClassification {
    SequenceKind kind;
    OriginKind origin;
    std::vector<double> ansc_deltas;
};

}  // namespace rflab

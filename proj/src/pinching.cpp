#include "rflab/pinching.hpp"

#include <algorithm>
#include <cmath>

#include "rflab/error.hpp"

namespace rflab {

void PinchingParams::validate() const {
    require(C0 > 0.0, ErrorCode::InvalidArgument, "C0 must be positive");
    require(tolerance >= 0.0, ErrorCode::InvalidArgument, "tolerance must be nonnegative");
}

double hamilton_ivey_threshold(double lambda1, const PinchingParams& params, double t) {
    params.validate();
    require(lambda1 < 0.0, ErrorCode::DomainError, "threshold only applies where lambda1 < 0");
    require(1.0 + params.C0 * t > 0.0, ErrorCode::DomainError, "1 + C0 t must be positive");
    const double x = -lambda1;
    return x * (std::log(x) + std::log1p(params.C0 * t) - std::log(params.C0) - 3.0);
}

double lambda3_lower_bound(double lambda1, const PinchingParams& params, double t) {
    params.validate();
    require(lambda1 < 0.0, ErrorCode::DomainError, "bound only applies where lambda1 < 0");
    const double span = 1.0 / params.C0 + t;
    require(span > 0.0, ErrorCode::DomainError, "1/C0 + t must be positive");
    const double x = -lambda1;
    return 0.5 * x * (std::log(x) + std::log(span) - 2.0);
}

PinchingReport check_pinching(std::span<const double> times,
                              std::span<const CurvatureSpectrum> spectra,
                              const PinchingParams& params) {
    params.validate();
    require(times.size() == spectra.size(), ErrorCode::InvalidArgument,
            "one time per spectrum required");
    PinchingReport report;
    for (std::size_t i = 0; i < spectra.size(); ++i) {
        auto l1 = spectra[i].lambda1();
        auto R = spectra[i].scalar();
        for (std::size_t j = 0; j < l1.size(); ++j) {
            if (!(l1[j] < 0.0)) continue;
            const double thr = hamilton_ivey_threshold(l1[j], params, times[i]);
            if (R[j] < thr - params.tolerance)
                report.violations.push_back({j, i, l1[j], R[j], thr});
        }
    }
    return report;
}

OriginKind classify_origin(double l1, double l2, double l3, double c_threshold) {
    const double norm = std::sqrt(l1 * l1 + l2 * l2 + l3 * l3);
    require(norm > 0.0, ErrorCode::NotEssential, "|Rm| = 0 at the origin");
    const double lo = std::min({l1, l2, l3});
    const double ratio = lo / norm;
    if (ratio >= c_threshold) return BumpLike{ratio, c_threshold};
    return SplitLike{ratio, c_threshold};
}

std::string to_string(SequenceKind k) {
    switch (k) {
    case SequenceKind::TypeIIILike: return "TypeIII_like";
    case SequenceKind::TypeIIbLike: return "TypeIIb_like";
    case SequenceKind::Indeterminate: return "Indeterminate";
    }
    return "Indeterminate";
}

SequenceVerdict classify_sequence(std::span<const double> t, std::span<const double> K, double C) {
    require(t.size() == K.size() && !t.empty(), ErrorCode::InvalidArgument,
            "t and K must be nonempty and of equal length");
    SequenceVerdict v{SequenceKind::Indeterminate, {}};
    v.tK.resize(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) v.tK[i] = t[i] * K[i];

    bool type3 = true;
    for (std::size_t i = 0; i < t.size(); ++i) type3 = type3 && K[i] <= C / t[i];
    if (type3) {
        v.kind = SequenceKind::TypeIIILike;
        return v;
    }
    const std::size_t n = v.tK.size();
    bool monotone = true;
    for (std::size_t i = n / 2; i + 1 < n; ++i) monotone = monotone && v.tK[i + 1] >= v.tK[i];
    if (n >= 2 && monotone && v.tK.back() > 10.0 * v.tK.front())
        v.kind = SequenceKind::TypeIIbLike;
    return v;
}

AnscResult ansc_verify(std::span<const std::vector<double>> lambda1_per_member,
                       std::span<const double> deltas) {
    require(lambda1_per_member.size() == deltas.size(), ErrorCode::InvalidArgument,
            "one delta per member required");
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        require(deltas[i] > 0.0, ErrorCode::InvalidArgument, "deltas must be positive");
        if (i > 0)
            require(deltas[i] <= deltas[i - 1], ErrorCode::InvalidArgument,
                    "deltas must be nonincreasing");
    }
    AnscResult res{true, std::numeric_limits<double>::infinity()};
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        const auto& l1 = lambda1_per_member[i];
        if (l1.empty()) continue;
        const double lo = *std::min_element(l1.begin(), l1.end());
        res.holds = res.holds && lo >= -deltas[i];
        res.worst_ratio = std::min(res.worst_ratio, lo / deltas[i]);
    }
    return res;
}

std::vector<double> geometric_deltas(double delta0, std::size_t n) {
    require(delta0 > 0.0, ErrorCode::InvalidArgument, "delta0 must be positive");
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = std::ldexp(delta0, -static_cast<int>(i));
    return d;
}

}  // namespace rflab

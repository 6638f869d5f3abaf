#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rflab {

enum class ErrorCode {
    GridTooSmall,
    DegenerateMetric,
    InvalidProfile,
    ZeroB,
    CflViolation,
    CurvatureBlowup,
    DomainError,
    NotEssential,
    FlatHistory,
    WindowOutOfRange,
    WindowEmpty,
    TooLarge,
    DegenerateScales,
    NoOverlap,
    SeamMismatch,
    TwoClosedEnds,
    ClosureFailure,
    InconsistentInput,
    NotPositive,
    InvalidArgument,
    IoError,
    ConfigError,
};

std::string_view to_string(ErrorCode code);

/// Every failure in the library is reported through this type; `code()` is the
/// stable, machine-checkable part.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

inline void require(bool cond, ErrorCode code, const std::string& what) {
    if (!cond) throw Error(code, what);
}

}  // namespace rflab

#include "rflab/error.hpp"

namespace rflab {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::GridTooSmall: return "GridTooSmall";
    case ErrorCode::DegenerateMetric: return "DegenerateMetric";
    case ErrorCode::InvalidProfile: return "InvalidProfile";
    case ErrorCode::ZeroB: return "ZeroB";
    case ErrorCode::CflViolation: return "CflViolation";
    case ErrorCode::CurvatureBlowup: return "CurvatureBlowup";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::NotEssential: return "NotEssential";
    case ErrorCode::FlatHistory: return "FlatHistory";
    case ErrorCode::WindowOutOfRange: return "WindowOutOfRange";
    case ErrorCode::WindowEmpty: return "WindowEmpty";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::DegenerateScales: return "DegenerateScales";
    case ErrorCode::NoOverlap: return "NoOverlap";
    case ErrorCode::SeamMismatch: return "SeamMismatch";
    case ErrorCode::TwoClosedEnds: return "TwoClosedEnds";
    case ErrorCode::ClosureFailure: return "ClosureFailure";
    case ErrorCode::InconsistentInput: return "InconsistentInput";
    case ErrorCode::NotPositive: return "NotPositive";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

}  // namespace rflab

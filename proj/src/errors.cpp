#include "reflev/errors.hpp"

namespace reflev {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::DomainBoundary: return "DomainBoundary";
        case ErrorCode::NotARoot: return "NotARoot";
        case ErrorCode::NonNegativeMean: return "NonNegativeMean";
        case ErrorCode::NoPositiveRoot: return "NoPositiveRoot";
        case ErrorCode::ToleranceNotReached: return "ToleranceNotReached";
        case ErrorCode::NonPositiveInput: return "NonPositiveInput";
        case ErrorCode::UnsupportedKind: return "UnsupportedKind";
        case ErrorCode::UnsupportedModel: return "UnsupportedModel";
        case ErrorCode::InvalidParameter: return "InvalidParameter";
        case ErrorCode::InsufficientRate: return "InsufficientRate";
        case ErrorCode::ExcessiveCensoring: return "ExcessiveCensoring";
        case ErrorCode::InsufficientCounts: return "InsufficientCounts";
        case ErrorCode::InsufficientData: return "InsufficientData";
        case ErrorCode::DegenerateBinning: return "DegenerateBinning";
    }
    return "?";
}

int error_exit_code(ErrorCode code) {
    switch (code) {
        case ErrorCode::ConfigError:
            return 1;
        case ErrorCode::ExcessiveCensoring:
        case ErrorCode::InsufficientCounts:
        case ErrorCode::InsufficientData:
        case ErrorCode::DegenerateBinning:
            return 3;
        default:
            return 2;
    }
}

}  // namespace reflev

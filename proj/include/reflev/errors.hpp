#pragma once

#include <stdexcept>
#include <string>

namespace reflev {

// Machine-readable failure codes. Grouped by how the CLI maps them to
// exit codes: config -> 1, numerical -> 2, statistical gate -> 3.
enum class ErrorCode {
    // config / usage
    ConfigError,
    // numerical / domain
    DomainBoundary,
    NotARoot,
    NonNegativeMean,
    NoPositiveRoot,
    ToleranceNotReached,
    NonPositiveInput,
    UnsupportedKind,
    UnsupportedModel,
    InvalidParameter,
    InsufficientRate,
    // statistical gates
    ExcessiveCensoring,
    InsufficientCounts,
    InsufficientData,
    DegenerateBinning,
};

const char* error_code_name(ErrorCode code);

// 1 = config, 2 = numerical, 3 = statistical gate
int error_exit_code(ErrorCode code);

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const { return code_; }

  private:
    ErrorCode code_;
};

[[noreturn]] inline void throw_error(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace reflev

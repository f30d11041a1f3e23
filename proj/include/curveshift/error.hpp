#pragma once

#include <stdexcept>
#include <string>

namespace curveshift {

/// Error codes surfaced by the library. Each maps to a stable string
/// used in CLI/JSON output.
enum class ErrorCode {
    SingularDesign,
    AllCandidatesSingular,
    DegenerateWindow,
    ShiftOutOfRange,
    NonConvex,
    BlockTooLarge,
    ParseError,
    TooFewRows,
    InvalidArgument,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
          code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace curveshift

#pragma once

#include <stdexcept>
#include <string>

namespace equibox {

enum class ErrorCode {
    VarCountMismatch,
    ExponentOverflow,
    NonDivisible,
    OutOfRange,
    ResourceGuard,
    Parse,
    InvalidMeasure,
    DegenerateDirection,
    InvalidOptions,
    DimensionMismatch,
    ShapeMismatch,
    UnpopulatedOffsets,
    Internal,
};

inline const char* to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::VarCountMismatch: return "VAR_COUNT_MISMATCH";
    case ErrorCode::ExponentOverflow: return "EXPONENT_OVERFLOW";
    case ErrorCode::NonDivisible: return "NON_DIVISIBLE";
    case ErrorCode::OutOfRange: return "OUT_OF_RANGE";
    case ErrorCode::ResourceGuard: return "RESOURCE_GUARD";
    case ErrorCode::Parse: return "PARSE_ERROR";
    case ErrorCode::InvalidMeasure: return "INVALID_MEASURE";
    case ErrorCode::DegenerateDirection: return "DEGENERATE_DIRECTION";
    case ErrorCode::InvalidOptions: return "INVALID_OPTIONS";
    case ErrorCode::DimensionMismatch: return "DIMENSION_MISMATCH";
    case ErrorCode::ShapeMismatch: return "SHAPE_MISMATCH";
    case ErrorCode::UnpopulatedOffsets: return "UNPOPULATED_OFFSETS";
    case ErrorCode::Internal: return "INTERNAL";
    }
    return "UNKNOWN";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace equibox

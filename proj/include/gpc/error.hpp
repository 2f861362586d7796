#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gpc {

/// Failure categories raised by the library. The C API maps each code onto a
/// process-level status (see gpc.h).
enum class ErrorCode {
    InvalidInput,
    DimensionMismatch,
    NotUnitVector,
    NotPointed,
    NotFullDimensional,
    InconsistentDualData,
    BadReferenceDirection,
    DirectionNotInterior,
    NonPositiveSupport,
    DirectionOutsideCone,
    MismatchedOmega,
    LPUnbounded,
    LPInfeasible,
    EmptyOmegaC,
    InactiveFacet,
    ZeroVolume,
    NotConverged,
    InfeasibleWeight,
    DegenerateMeasure,
    StepTooLarge,
    PeakNotFound,
    VerificationFailed,
    ParseError,
    ValidationError,
    IoError,
    Internal,
};

std::string_view error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
    throw Error(code, what);
}

}  // namespace gpc

#include "gpc/error.hpp"

namespace gpc {

std::string_view error_code_name(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidInput: return "InvalidInput";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::NotUnitVector: return "NotUnitVector";
        case ErrorCode::NotPointed: return "NotPointed";
        case ErrorCode::NotFullDimensional: return "NotFullDimensional";
        case ErrorCode::InconsistentDualData: return "InconsistentDualData";
        case ErrorCode::BadReferenceDirection: return "BadReferenceDirection";
        case ErrorCode::DirectionNotInterior: return "DirectionNotInterior";
        case ErrorCode::NonPositiveSupport: return "NonPositiveSupport";
        case ErrorCode::DirectionOutsideCone: return "DirectionOutsideCone";
        case ErrorCode::MismatchedOmega: return "MismatchedOmega";
        case ErrorCode::LPUnbounded: return "LPUnbounded";
        case ErrorCode::LPInfeasible: return "LPInfeasible";
        case ErrorCode::EmptyOmegaC: return "EmptyOmegaC";
        case ErrorCode::InactiveFacet: return "InactiveFacet";
        case ErrorCode::ZeroVolume: return "ZeroVolume";
        case ErrorCode::NotConverged: return "NotConverged";
        case ErrorCode::InfeasibleWeight: return "InfeasibleWeight";
        case ErrorCode::DegenerateMeasure: return "DegenerateMeasure";
        case ErrorCode::StepTooLarge: return "StepTooLarge";
        case ErrorCode::PeakNotFound: return "PeakNotFound";
        case ErrorCode::VerificationFailed: return "VerificationFailed";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::ValidationError: return "ValidationError";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::Internal: return "Internal";
    }
    return "Unknown";
}

}  // namespace gpc

#include "weiermnv/errors.hpp"

namespace wmnv {

const char *to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::NonPositiveImaginaryModulus: return "NonPositiveImaginaryModulus";
    case ErrorCode::BadResolution: return "BadResolution";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::NonZeroMeanInput: return "NonZeroMeanInput";
    case ErrorCode::DegenerateProfile: return "DegenerateProfile";
    case ErrorCode::DegenerateImmersion: return "DegenerateImmersion";
    case ErrorCode::NotConformal: return "NotConformal";
    case ErrorCode::NonPeriodicImage: return "NonPeriodicImage";
    case ErrorCode::DiracResidualTooLarge: return "DiracResidualTooLarge";
    case ErrorCode::BranchInconsistency: return "BranchInconsistency";
    case ErrorCode::NonRealPotential: return "NonRealPotential";
    case ErrorCode::CenterOnSurface: return "CenterOnSurface";
    case ErrorCode::IntegrationFailure: return "IntegrationFailure";
    case ErrorCode::TruncationTooSmall: return "TruncationTooSmall";
    case ErrorCode::BlowupDetected: return "BlowupDetected";
    case ErrorCode::NoConservingCandidate: return "NoConservingCandidate";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

} // namespace wmnv

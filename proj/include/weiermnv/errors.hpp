#pragma once

#include <stdexcept>
#include <string>

namespace wmnv {

enum class ErrorCode {
    NonPositiveImaginaryModulus,
    BadResolution,
    GridMismatch,
    NonZeroMeanInput,
    DegenerateProfile,
    DegenerateImmersion,
    NotConformal,
    NonPeriodicImage,
    DiracResidualTooLarge,
    BranchInconsistency,
    NonRealPotential,
    CenterOnSurface,
    IntegrationFailure,
    TruncationTooSmall,
    BlowupDetected,
    NoConservingCandidate,
    InvalidArgument,
    Io,
};

const char *to_string(ErrorCode code) noexcept;

/// Every library failure carries one of the codes above; the CLI maps them to exit codes.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string &what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace wmnv

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qbounds {

enum class ErrorKind {
    ParseError,
    InvariantViolation,
    NotHermitian,
    EigSolverFailure,
    BlockMismatch,
    NotPsd,
    SingularModel,
    DerivativeOutsideModel,
    RldUnsupported,
    IllConditionedOutcome,
    SolverFailure,
    GapTooLarge,
    DimensionMismatch,
    OddPhotonNumber,
    BoundaryTransmissivity,
    AllRestartsFailed,
    InvalidArgument,
};

std::string_view to_string(ErrorKind kind);

/// Library-wide exception. `kind()` is the stable, machine-readable part;
/// the message carries the residual or offending value.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::InvariantViolation: return "InvariantViolation";
        case ErrorKind::NotHermitian: return "NotHermitian";
        case ErrorKind::EigSolverFailure: return "EigSolverFailure";
        case ErrorKind::BlockMismatch: return "BlockMismatch";
        case ErrorKind::NotPsd: return "NotPsd";
        case ErrorKind::SingularModel: return "SingularModel";
        case ErrorKind::DerivativeOutsideModel: return "DerivativeOutsideModel";
        case ErrorKind::RldUnsupported: return "RldUnsupported";
        case ErrorKind::IllConditionedOutcome: return "IllConditionedOutcome";
        case ErrorKind::SolverFailure: return "SolverFailure";
        case ErrorKind::GapTooLarge: return "GapTooLarge";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::OddPhotonNumber: return "OddPhotonNumber";
        case ErrorKind::BoundaryTransmissivity: return "BoundaryTransmissivity";
        case ErrorKind::AllRestartsFailed: return "AllRestartsFailed";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

}  // namespace qbounds

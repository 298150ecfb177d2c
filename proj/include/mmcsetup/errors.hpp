#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mmcsetup {

enum class ErrorCode {
    InvalidParameter,
    Unstable,
    InvalidState,
    DegeneratePoles,
    NumericalBreakdown,
    SingularDiagonal,
    SingularMatrix,
    DegenerateBoundary,
    TruncationInsufficient,
    InternalInconsistency,
    DegenerateCondition,
    InvalidConfig,
    NoCrossing,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::Unstable: return "Unstable";
    case ErrorCode::InvalidState: return "InvalidState";
    case ErrorCode::DegeneratePoles: return "DegeneratePoles";
    case ErrorCode::NumericalBreakdown: return "NumericalBreakdown";
    case ErrorCode::SingularDiagonal: return "SingularDiagonal";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::DegenerateBoundary: return "DegenerateBoundary";
    case ErrorCode::TruncationInsufficient: return "TruncationInsufficient";
    case ErrorCode::InternalInconsistency: return "InternalInconsistency";
    case ErrorCode::DegenerateCondition: return "DegenerateCondition";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::NoCrossing: return "NoCrossing";
    }
    return "Unknown";
}

/// Every failure raised by the library. `code()` is the machine-readable kind;
/// `what()` carries a human-readable diagnostic.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Raised when rho >= 1. Carries the offending traffic intensity.
class UnstableError : public Error {
public:
    explicit UnstableError(double rho)
        : Error(ErrorCode::Unstable, "traffic intensity rho = " + std::to_string(rho) + " >= 1"),
          rho_(rho) {}

    [[nodiscard]] double rho() const noexcept { return rho_; }

private:
    double rho_;
};

/// Raised when two characteristic poles coincide (within tolerance).
class DegeneratePolesError : public Error {
public:
    DegeneratePolesError(int a, int b, double value)
        : Error(ErrorCode::DegeneratePoles,
                "poles zhat_" + std::to_string(a) + " and zhat_" + std::to_string(b) +
                    " coincide near " + std::to_string(value) +
                    "; perturb alpha by ~1e-7 relative and retry"),
          a_(a), b_(b) {}

    [[nodiscard]] int first() const noexcept { return a_; }
    [[nodiscard]] int second() const noexcept { return b_; }

private:
    int a_;
    int b_;
};

}  // namespace mmcsetup

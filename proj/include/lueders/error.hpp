#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lueders {

enum class ErrorKind {
    NotHermitian,
    NotPositive,
    DimMismatch,
    SpectrumOutOfRange,
    Incomplete,
    IndexOutOfRange,
    ZeroOperator,
    HypothesisViolated,
    SingularNormalizer,
    OutOfRange,
    InvalidArgument,
    NotADensity,
    TooManyOutcomes,
    Parse,
};

std::string_view error_kind_name(ErrorKind k);

/// Every precondition/validation failure in the library surfaces as this
/// exception; `kind()` names the violated contract, `what()` carries the
/// offending magnitude.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& detail)
        : std::runtime_error(std::string(error_kind_name(kind)) + ": " + detail), kind_(kind), detail_(detail) {}

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorKind kind_;
    std::string detail_;
};

inline std::string_view error_kind_name(ErrorKind k) {
    switch (k) {
        case ErrorKind::NotHermitian: return "NotHermitian";
        case ErrorKind::NotPositive: return "NotPositive";
        case ErrorKind::DimMismatch: return "DimMismatch";
        case ErrorKind::SpectrumOutOfRange: return "SpectrumOutOfRange";
        case ErrorKind::Incomplete: return "Incomplete";
        case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorKind::ZeroOperator: return "ZeroOperator";
        case ErrorKind::HypothesisViolated: return "HypothesisViolated";
        case ErrorKind::SingularNormalizer: return "SingularNormalizer";
        case ErrorKind::OutOfRange: return "OutOfRange";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::NotADensity: return "NotADensity";
        case ErrorKind::TooManyOutcomes: return "TooManyOutcomes";
        case ErrorKind::Parse: return "Parse";
    }
    return "Unknown";
}

}  // namespace lueders

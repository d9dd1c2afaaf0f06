#include "polydyn/errors.hpp"

namespace polydyn {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::MalformedMap: return "MalformedMap";
    case ErrorCode::MalformedInput: return "MalformedInput";
    case ErrorCode::InvalidPi: return "InvalidPi";
    case ErrorCode::PrecisionLoss: return "PrecisionLoss";
    case ErrorCode::UnknownVariable: return "UnknownVariable";
    case ErrorCode::BadExponent: return "BadExponent";
    case ErrorCode::UnbalancedParens: return "UnbalancedParens";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::NotAlgebraicallyStable: return "NotAlgebraicallyStable";
    case ErrorCode::SlopeZero: return "SlopeZero";
    case ErrorCode::SharedComponent: return "SharedComponent";
    case ErrorCode::Indeterminate: return "Indeterminate";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::NonConvergent: return "NonConvergent";
    case ErrorCode::DegenerateTarget: return "DegenerateTarget";
    case ErrorCode::Inconsistent: return "Inconsistent";
    case ErrorCode::TooManyIndeterminate: return "TooManyIndeterminate";
    case ErrorCode::MBelowOne: return "MBelowOne";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::Unsupported: return "Unsupported";
    }
    return "Unknown";
}

} // namespace polydyn

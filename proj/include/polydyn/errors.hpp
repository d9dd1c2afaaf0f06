#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace polydyn {

enum class ErrorCode {
    MalformedMap,
    MalformedInput,
    InvalidPi,
    PrecisionLoss,
    UnknownVariable,
    BadExponent,
    UnbalancedParens,
    SyntaxError,
    NotAlgebraicallyStable,
    SlopeZero,
    SharedComponent,
    Indeterminate,
    TooShort,
    NonConvergent,
    DegenerateTarget,
    Inconsistent,
    TooManyIndeterminate,
    MBelowOne,
    InsufficientSamples,
    Unsupported,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string &what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

/// Parse failures carry a 1-based position pointing inside the offending token.
class ParseError : public Error {
  public:
    ParseError(ErrorCode code, const std::string &what, int line, int column)
        : Error(code, what + " at line " + std::to_string(line) + ", column " +
                          std::to_string(column)),
          line_(line), column_(column) {}

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

  private:
    int line_;
    int column_;
};

} // namespace polydyn

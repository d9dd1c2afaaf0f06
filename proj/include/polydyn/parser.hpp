#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "polydyn/polynomial.hpp"

namespace polydyn {

struct SourceSpan {
    int line = 1;
    int column = 1;
    std::size_t offset = 0;
    std::size_t length = 0;
};

struct MapDocument {
    std::size_t k = 0;
    std::vector<std::string> variables;
    std::vector<std::string> component_text;
    std::vector<SourceSpan> spans;
    PolynomialMap map;
};

/// Map file grammar:
///
///   file      := [ "vars:" z1 ... zk NEWLINE ] component { (","|NEWLINE) component }
///   component := ["+"|"-"] term { ("+"|"-") term }
///   term      := factor { ["*"] factor }      "*" may be omitted only before a variable
///   factor    := primary [ "^" integer ]
///   primary   := number ["i"] | "i" | z<n> | "(" component ")"
///   number    := digits [ "." digits ] [ ("e"|"E") ["+"|"-"] digits ] [ "/" digits ]
///
/// Without a header, k is the number of components. `#` starts a comment.
/// Decimals are converted exactly.
MapDocument parse_document(std::string_view text);
PolynomialMap parse_map(std::string_view text);
/// Parses a single expression over z1..zk.
Polynomial parse_polynomial(std::string_view text, std::size_t k);

/// Canonical text: descending graded-lex terms, "*" between factors,
/// non-real coefficients parenthesized. parse(format(p)) == p.
std::string format_polynomial(const Polynomial &p);
std::string format_coefficient(const GaussianRational &c);
/// One component per line.
std::string format_map(const PolynomialMap &map);

} // namespace polydyn

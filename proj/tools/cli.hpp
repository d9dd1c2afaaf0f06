#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace polydyn::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;
inline constexpr int kValidation = 2;
inline constexpr int kIndeterminate = 3;

/// Subcommands: analyze, classify, green, measure, degree, loja, dimension.
/// `args` excludes the program name. Summaries go to `out` as JSON;
/// diagnostics go to `err`.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

/// Pretty JSON with stable key order: nested objects indented by two spaces,
/// arrays of scalars kept on one line as [a,b,c].
std::string format_json(const nlohmann::ordered_json &j);

/// Basin colours for U_1..U_8; indices past 8 wrap around. K is black and
/// Indeterminate is white.
struct Rgb {
    unsigned char r, g, b;
};
Rgb basin_colour(std::size_t index);

} // namespace polydyn::cli

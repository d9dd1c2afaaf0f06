#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "polydyn/regularity.hpp"
#include "polydyn/scaled.hpp"

namespace polydyn {

enum class OrbitStatus { Escaped, Bounded, MaxedOut, Indeterminate };
const char *to_string(OrbitStatus s);

struct OrbitParams {
    std::size_t max_n = 200;
    double escape_ell = 1e4;
    double bound_ell = std::log(1e6);
    /// Boundedness window W.
    std::size_t window = 50;
    /// Escaped orbits are followed for at least this many steps so that the
    /// rate estimate has enough tail points.
    std::size_t min_escape_steps = 4;
    PrecisionPolicy precision;
};

struct OrbitRecord {
    /// ell_n = log |f^n(z)| in the max norm; -inf for the zero vector.
    std::vector<double> ells;
    OrbitStatus status = OrbitStatus::MaxedOut;
    /// Escaped through the additive detector (ell_{n+1} - ell_n stabilizing
    /// at a positive constant) rather than by crossing escape_ell.
    bool linear_escape = false;
    std::size_t steps = 0;
    unsigned bits = 53;
};

OrbitRecord iterate(const CompiledMap &map, std::span<const Complex> z0, const OrbitParams &params = {});

/// Multiplicative escape rate: geometric mean of the last three ratios
/// ell_{n+1}/ell_n. Zero for orbits that did not escape; throws TooShort when
/// an escaped orbit has fewer than four positive tail points.
double escape_degree(const OrbitRecord &orbit);

/// alpha_i as doubles; the block degrees when the report carries no pi.
std::vector<double> alpha_values(const RegularityReport &report);

struct BasinLabel {
    enum class Kind { U, K, Indeterminate };
    Kind kind = Kind::Indeterminate;
    /// 1-based level for Kind::U.
    std::size_t index = 0;
    double rate = 0.0;

    static BasinLabel u(std::size_t i, double rate) { return {Kind::U, i, rate}; }
    static BasinLabel k() { return {Kind::K, 0, 0.0}; }
    static BasinLabel indeterminate(double rate = 0.0) { return {Kind::Indeterminate, 0, rate}; }
    std::string name() const;
    friend bool operator==(const BasinLabel &a, const BasinLabel &b) {
        return a.kind == b.kind && a.index == b.index;
    }
};

/// Relative tolerance when matching an escape rate to an alpha_i.
inline constexpr double kRateMatchTolerance = 0.25;

/// Index (1-based) of the alpha_i within kRateMatchTolerance of `rate`, or 0.
std::size_t match_rate(std::span<const double> alpha, double rate);

BasinLabel classify(const CompiledMap &map, std::span<const double> alpha, std::span<const Complex> z,
                    const OrbitParams &params = {});

struct GreenValue {
    enum class Kind { Finite, Infinite, Indeterminate, NonConvergent };
    Kind kind = Kind::Indeterminate;
    double value = 0.0;
    std::size_t iterations = 0;
    /// Last increment |G_{i,n} - G_{i,n-1}|.
    double residual = 0.0;

    bool finite() const { return kind == Kind::Finite; }
};

struct GreenParams {
    double tol = 1e-12;
    OrbitParams orbit;
};

/// G_i(z) = lim max(ell_n, 0) / alpha_i^n. The orbit is followed past
/// escape_ell until the tail bound incr / (alpha_i - 1) drops below tol.
/// Infinite when the orbit escapes strictly faster than alpha_i; 0 when it is
/// bounded or escapes strictly slower. Never throws on numerical failure.
GreenValue green_value(const CompiledMap &map, std::span<const double> alpha, std::size_t i,
                       std::span<const Complex> z, const GreenParams &params = {});

/// As green_value, but throws NonConvergent and Indeterminate as errors.
GreenValue green(const CompiledMap &map, std::span<const double> alpha, std::size_t i, std::span<const Complex> z,
                 const GreenParams &params = {});

struct InvarianceResult {
    double max_residual = 0.0;
    std::size_t used = 0;
    std::size_t skipped = 0;
};

/// max |G_i(f(z)) - alpha_i G_i(z)| over the samples where both values are
/// finite. G_i(f(z)) and G_i(z) are computed from independent orbits.
InvarianceResult invariance_residual(const CompiledMap &map, std::span<const double> alpha, std::size_t i,
                                     const std::vector<std::vector<Complex>> &samples,
                                     const GreenParams &params = {});

struct LojasiewiczOptions {
    double radius = 1e6;
    std::size_t samples = 4096;
    std::size_t descent_steps = 200;
    /// Number of best samples refined by pattern search.
    std::size_t refine = 16;
    std::uint64_t seed = 1;
    PrecisionPolicy precision;
};

struct LojasiewiczResult {
    double lambda_hat = 0.0;
    /// Point of the max-norm sphere |z| = R attaining lambda_hat.
    std::vector<Complex> argmin;
    std::size_t evaluations = 0;
};

/// Minimum of log|f(z)| / log R over the max-norm sphere of radius R, from
/// random samples refined by pattern search in log-polar coordinates.
LojasiewiczResult lojasiewicz_estimate(const CompiledMap &map, const LojasiewiczOptions &options = {});

/// log |f(z)| / log |z| at one point, max norms, adaptive precision. NaN if
/// precision is exhausted.
double growth_ratio(const CompiledMap &map, const ScaledPoint &p, const PrecisionPolicy &policy = {});

} // namespace polydyn

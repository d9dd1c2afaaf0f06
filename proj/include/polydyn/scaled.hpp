#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "polydyn/polynomial.hpp"

namespace polydyn {

/// A point of C^k stored as direction u and log-magnitude ell, z = u * e^ell,
/// with max_j |u_j| = 1 (max norm). The zero vector is flagged separately so
/// that ell stays finite.
struct ScaledPoint {
    std::vector<Complex> u;
    double ell = 0.0;
    bool zero = true;

    static ScaledPoint from_point(std::span<const Complex> z);
    std::size_t dim() const { return u.size(); }
    /// Plain coordinates; overflows to infinity for huge ell.
    std::vector<Complex> to_point() const;
};

struct ScaledResult {
    ScaledPoint point;
    /// Largest single term magnitude over the result's max-norm magnitude.
    double cancellation_ratio = 1.0;
    unsigned bits = 53;
};

/// Adaptive precision settings shared by all orbit drivers.
struct PrecisionPolicy {
    unsigned start_bits = 53;
    unsigned cap_bits = 1024;
    /// A step is rejected when fewer significant bits than this survive cancellation.
    unsigned min_retained_bits = 24;
};

/// Numeric precompilation of a map split into homogeneous parts, used by every
/// evaluation in scaled coordinates. Immutable once built.
class CompiledMap {
  public:
    struct CTerm {
        Complex coeff;
        GaussianRational exact;
        std::vector<unsigned> exps;
    };
    struct CPart {
        unsigned degree = 0;
        std::vector<CTerm> terms;
    };
    struct CPoly {
        std::vector<CPart> parts;
    };

    explicit CompiledMap(PolynomialMap map);

    const PolynomialMap &map() const { return map_; }
    std::size_t dim() const { return map_.dim(); }
    const std::vector<CPoly> &polys() const { return polys_; }
    const std::vector<unsigned> &max_exponents() const { return max_exps_; }
    unsigned max_degree() const { return max_degree_; }

    /// f(p) at the given working precision; throws PrecisionLoss when the
    /// result does not retain policy.min_retained_bits significant bits.
    ScaledResult eval_scaled(const ScaledPoint &p, unsigned bits = 53,
                             unsigned min_retained_bits = PrecisionPolicy{}.min_retained_bits) const;

  private:
    PolynomialMap map_;
    std::vector<CPoly> polys_;
    std::vector<unsigned> max_exps_;
    unsigned max_degree_ = 0;
};

ScaledResult eval_scaled(const PolynomialMap &map, const ScaledPoint &p, unsigned bits = 53);

/// Scaled value of a single polynomial: mantissa * e^log_scale.
struct ScaledScalar {
    Complex mantissa;
    double log_scale = 0.0;
};

/// Evaluates each polynomial at u*e^ell in double precision without overflow.
std::vector<ScaledScalar> eval_scaled_polys(std::span<const Polynomial> polys, const ScaledPoint &p);

struct OrbitTrace {
    std::vector<double> ells;
    unsigned bits = 53;
    bool precision_exhausted = false;
};

/// Returns true to stop. Called after each appended log-magnitude, including
/// the initial one.
using StopRule = std::function<bool(const std::vector<double> &ells)>;

/// Iterates the map from z0 until the stop rule fires or max_steps is reached.
/// On precision loss the whole orbit is recomputed with doubled working
/// precision, up to policy.cap_bits; beyond that the trace is returned with
/// precision_exhausted set and the log-magnitudes computed so far.
OrbitTrace trace_orbit(const CompiledMap &map, std::span<const Complex> z0, std::size_t max_steps,
                       const PrecisionPolicy &policy, const StopRule &stop);

} // namespace polydyn

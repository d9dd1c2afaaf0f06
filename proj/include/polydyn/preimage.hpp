#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "polydyn/forms.hpp"
#include "polydyn/polynomial.hpp"

namespace polydyn {

/// Distinct roots with multiplicities; residuals are |p(root)| relative to
/// sum_j |a_j| |root|^j.
struct RootSet {
    std::vector<Complex> roots;
    std::vector<std::size_t> multiplicity;
    std::vector<double> residuals;

    std::size_t count() const;
    /// Roots repeated by multiplicity.
    std::vector<Complex> expanded() const;
};

/// Aberth-Ehrlich iteration with Newton polish; roots closer than sqrt(tol)
/// (relative) are merged into one root of higher multiplicity. Coefficients
/// highest power first. Throws MalformedInput below degree 1 and
/// NonConvergent when the iteration cap is reached.
RootSet roots(std::span<const Complex> coeffs, double tol = 1e-12);

/// Evaluates a dense polynomial (highest power first).
Complex horner(std::span<const Complex> coeffs, Complex z);

/// Preimage solver for a 2-D map: the exact resultant
/// R(z1; w1, w2) = Res_{z2}(P1 - w1, P2 - w2) is built once over Q(i),
/// then specialized numerically for each target.
class PreimageSolver {
  public:
    explicit PreimageSolver(PolynomialMap map);

    const PolynomialMap &map() const { return map_; }
    /// Generic z1-degree of the resultant, i.e. the generic preimage count.
    std::size_t degree() const { return coeffs_.size() - 1; }
    /// Coefficient of z1^e as an exact polynomial in (w1, w2).
    const Polynomial &exact_coefficient(std::size_t e) const { return exact_[e]; }

    /// Points p with |f(p) - w| < tol * (1 + |w|), repeated by multiplicity.
    /// Throws DegenerateTarget when the leading coefficient vanishes at w.
    std::vector<std::vector<Complex>> solve(std::span<const Complex> w, double tol = 1e-8) const;
    /// Same, with an exact degeneracy test on the leading coefficient.
    std::vector<std::vector<Complex>> solve(std::span<const GaussianRational> w, double tol = 1e-8) const;

  private:
    std::vector<std::vector<Complex>> solve_numeric(std::span<const Complex> w, double tol) const;
    std::vector<Complex> specialize(std::span<const Complex> w) const;

    PolynomialMap map_;
    std::vector<Polynomial> exact_;
    struct WTerm {
        Complex c;
        unsigned j1, j2;
    };
    std::vector<std::vector<WTerm>> coeffs_;
    std::vector<Polynomial> dz2_p1_, dz2_p2_;
    PolynomialMatrix jac_;
};

std::vector<std::vector<Complex>> preimages(const PolynomialMap &map, std::span<const Complex> w, double tol = 1e-8);

struct DegreeCount {
    std::size_t degree = 0;
    std::vector<std::size_t> counts;
    std::size_t degenerate_retries = 0;
    /// Largest relative residual |f(p) - w| / (1 + |w|) over all returned points.
    double max_residual = 0.0;
};

/// Modal preimage count over random exact Gaussian-rational targets. Throws
/// Inconsistent when the counts disagree.
DegreeCount topological_degree(const PolynomialMap &map, std::size_t trials, std::uint64_t seed, double tol = 1e-8);

struct MeasureCloud {
    std::vector<std::vector<Complex>> points;
    std::uint64_t seed = 0;
    std::size_t burn_in = 0;
    std::size_t chains = 0;
    std::size_t chain_length = 0;
    std::uint64_t map_hash = 0;
};

/// FNV-1a of the canonical map text.
std::uint64_t map_hash(const PolynomialMap &map);

struct SampleOptions {
    std::size_t n_points = 100000;
    std::size_t burn_in = 30;
    /// Independent chains; fixed so the cloud does not depend on thread count.
    std::size_t chains = 8;
    std::uint64_t seed = 1;
    double start_radius = 1.0;
    double tol = 1e-8;
};

/// Random inverse orbits: each state jumps to a uniformly chosen preimage
/// (counted with multiplicity). Chain c emits points after its own burn-in.
MeasureCloud equilibrium_sample(const PolynomialMap &map, const SampleOptions &options);

} // namespace polydyn
